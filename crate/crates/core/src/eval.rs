//! Edge-level UCCA scoring and unit confusion matrices.
//!
//! Edges are matched by the terminal yields of both endpoints (punctuation
//! excluded) together with one category; an edge with several categories
//! contributes one key per category. Scores are micro-averaged over the corpus.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::ucca::{Category, CategorySet, UccaPassage};

pub const EMPTY_LABEL: &str = "∅";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("passages without a counterpart: gold only {gold_only:?}, predicted only {pred_only:?}")]
    Unaligned {
        gold_only: Vec<String>,
        pred_only: Vec<String>,
    },
    #[error("passage `{0}` appears more than once")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeKey {
    pub parent_yield: BTreeSet<usize>,
    pub child_yield: BTreeSet<usize>,
    pub category: Option<Category>,
    pub remote: bool,
}

impl EdgeKey {
    fn unlabeled(&self) -> EdgeKey {
        EdgeKey {
            category: None,
            ..self.clone()
        }
    }
}

impl std::fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let span = |y: &BTreeSet<usize>| y.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
        let cat = self.category.map_or("-".to_string(), |c| c.to_string());
        let remote = if self.remote { "*" } else { "" };
        write!(
            f,
            "{cat}{remote}[{}]<[{}]",
            span(&self.child_yield),
            span(&self.parent_yield)
        )
    }
}

/// Yields over non-punctuation terminals.
fn content_yields(p: &UccaPassage) -> HashMap<String, BTreeSet<usize>> {
    let mut ys = p.yields();
    for y in ys.values_mut() {
        y.retain(|&t| t >= 1 && t <= p.terminals.len() && !p.terminals[t - 1].punct);
    }
    ys
}

/// One key per (edge, category), skipping `U` and punctuation-only children.
pub fn edge_keys(p: &UccaPassage) -> Vec<EdgeKey> {
    let ys = content_yields(p);
    let mut out = Vec::new();
    for e in &p.edges {
        let (Some(py), Some(cy)) = (ys.get(&e.parent), ys.get(&e.child)) else {
            continue;
        };
        if cy.is_empty() {
            continue;
        }
        for c in e.categories.iter().filter(|&c| c != Category::U) {
            out.push(EdgeKey {
                parent_yield: py.clone(),
                child_yield: cy.clone(),
                category: Some(c),
                remote: e.remote,
            });
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub matched: usize,
    pub gold: usize,
    pub predicted: usize,
}

impl Counts {
    fn add(&mut self, other: Counts) {
        self.matched += other.matched;
        self.gold += other.gold;
        self.predicted += other.predicted;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Nothing was predicted, so precision is reported as 0.
    pub precision_undefined: bool,
    pub counts: Counts,
}

impl Prf {
    pub fn from_counts(counts: Counts) -> Prf {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(counts.matched, counts.predicted);
        let recall = ratio(counts.matched, counts.gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            precision_undefined: counts.predicted == 0,
            counts,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EvalScores {
    pub labeled: bool,
    pub primary: Prf,
    pub remote: Prf,
}

fn multiset(keys: impl IntoIterator<Item = EdgeKey>) -> HashMap<EdgeKey, usize> {
    let mut m = HashMap::new();
    for k in keys {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// Per-stratum counts for one passage pair: `[primary, remote]`.
fn pair_counts(gold: &UccaPassage, pred: &UccaPassage, labeled: bool) -> [Counts; 2] {
    let prep = |p: &UccaPassage| {
        edge_keys(p)
            .into_iter()
            .map(|k| if labeled { k } else { k.unlabeled() })
            .collect::<Vec<_>>()
    };
    let g = multiset(prep(gold));
    let p = multiset(prep(pred));
    let mut out = [Counts::default(); 2];
    for (k, &n) in &g {
        out[k.remote as usize].gold += n;
        out[k.remote as usize].matched += n.min(p.get(k).copied().unwrap_or(0));
    }
    for (k, &n) in &p {
        out[k.remote as usize].predicted += n;
    }
    out
}

/// Pairs passages by id; every id must occur exactly once on each side.
pub fn align<'a>(
    gold: &'a [UccaPassage],
    pred: &'a [UccaPassage],
) -> Result<Vec<(&'a UccaPassage, &'a UccaPassage)>, EvalError> {
    let mut by_id: BTreeMap<&str, &UccaPassage> = BTreeMap::new();
    for p in pred {
        if by_id.insert(&p.passage_id, p).is_some() {
            return Err(EvalError::Duplicate(p.passage_id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut gold_only = Vec::new();
    for g in gold {
        if !seen.insert(g.passage_id.as_str()) {
            return Err(EvalError::Duplicate(g.passage_id.clone()));
        }
        match by_id.get(g.passage_id.as_str()) {
            Some(p) => out.push((g, *p)),
            None => gold_only.push(g.passage_id.clone()),
        }
    }
    let pred_only: Vec<String> = by_id
        .keys()
        .filter(|id| !seen.contains(*id))
        .map(|id| id.to_string())
        .collect();
    if gold_only.is_empty() && pred_only.is_empty() {
        Ok(out)
    } else {
        Err(EvalError::Unaligned { gold_only, pred_only })
    }
}

fn scores_from(totals: [Counts; 2], labeled: bool) -> EvalScores {
    EvalScores {
        labeled,
        primary: Prf::from_counts(totals[0]),
        remote: Prf::from_counts(totals[1]),
    }
}

/// Micro-averaged scores over aligned passages.
pub fn score(gold: &[UccaPassage], pred: &[UccaPassage], labeled: bool) -> Result<EvalScores, EvalError> {
    let mut totals = [Counts::default(); 2];
    for (g, p) in align(gold, pred)? {
        let c = pair_counts(g, p, labeled);
        totals[0].add(c[0]);
        totals[1].add(c[1]);
    }
    Ok(scores_from(totals, labeled))
}

/// Recursive yield of a unit, following primary edges only.
fn naive_yield(p: &UccaPassage, u: &str, depth: usize) -> Vec<usize> {
    let mut out: Vec<usize> = p.units[u]
        .anchors
        .iter()
        .copied()
        .filter(|&t| !p.terminals[t - 1].punct)
        .collect();
    if depth > p.units.len() {
        return out;
    }
    for e in &p.edges {
        if !e.remote && e.parent == u {
            out.extend(naive_yield(p, &e.child, depth + 1));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

type NaiveKey = (Vec<usize>, Vec<usize>, Option<Category>, bool);

fn naive_keys(p: &UccaPassage, labeled: bool) -> Vec<NaiveKey> {
    let mut out = Vec::new();
    for e in &p.edges {
        let child = naive_yield(p, &e.child, 0);
        if child.is_empty() {
            continue;
        }
        let parent = naive_yield(p, &e.parent, 0);
        for c in Category::ALL {
            if c != Category::U && e.categories.contains(c) {
                out.push((parent.clone(), child.clone(), labeled.then_some(c), e.remote));
            }
        }
    }
    out
}

/// Reference scorer: quadratic greedy matching over plain vectors. Only
/// meant for small passages in tests.
pub fn score_bruteforce(gold: &[UccaPassage], pred: &[UccaPassage], labeled: bool) -> Result<EvalScores, EvalError> {
    let mut totals = [Counts::default(); 2];
    for g in gold {
        let Some(p) = pred.iter().find(|p| p.passage_id == g.passage_id) else {
            return Err(EvalError::Unaligned {
                gold_only: vec![g.passage_id.clone()],
                pred_only: vec![],
            });
        };
        let gk = naive_keys(g, labeled);
        let pk = naive_keys(p, labeled);
        let mut used = vec![false; gk.len()];
        for k in &pk {
            totals[k.3 as usize].predicted += 1;
            for (i, x) in gk.iter().enumerate() {
                if !used[i] && x == k {
                    used[i] = true;
                    totals[k.3 as usize].matched += 1;
                    break;
                }
            }
        }
        for k in &gk {
            totals[k.3 as usize].gold += 1;
        }
    }
    Ok(scores_from(totals, labeled))
}

impl EvalScores {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("stratum\tlabeled\tprecision\trecall\tf1\tmatched\tgold\tpredicted\n");
        for (name, s) in [("primary", &self.primary), ("remote", &self.remote)] {
            let _ = writeln!(
                out,
                "{name}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}\t{}",
                self.labeled, s.precision, s.recall, s.f1, s.counts.matched, s.counts.gold, s.counts.predicted
            );
        }
        out
    }
}

fn label(c: CategorySet) -> String {
    if c.is_empty() {
        EMPTY_LABEL.to_string()
    } else {
        c.to_string()
    }
}

/// Label of the unit closest to the root for every distinct non-empty yield.
fn top_labels(p: &UccaPassage) -> BTreeMap<BTreeSet<usize>, String> {
    let ys = content_yields(p);
    let mut out = BTreeMap::new();
    let mut frontier = vec![p.root.clone()];
    // Breadth-first, so the first label stored for a yield is the topmost.
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for u in &frontier {
            for e in p.primary_children(u) {
                let Some(y) = ys.get(&e.child) else { continue };
                if !y.is_empty() && !e.categories.contains(Category::U) {
                    out.entry(y.clone()).or_insert_with(|| label(e.categories));
                }
                next.push(e.child.clone());
            }
        }
        frontier = next;
    }
    out
}

/// Counts keyed by (predicted label, gold label); `∅` marks a unit with no
/// counterpart of the same yield.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub cells: BTreeMap<(String, String), usize>,
}

impl ConfusionMatrix {
    pub fn get(&self, pred: &str, gold: &str) -> usize {
        self.cells
            .get(&(pred.to_string(), gold.to_string()))
            .copied()
            .unwrap_or(0)
    }

    fn labels(&self, pick: impl Fn(&(String, String)) -> &String) -> Vec<String> {
        let mut set: BTreeSet<String> = self.cells.keys().map(|k| pick(k).clone()).collect();
        set.remove(EMPTY_LABEL);
        let mut v: Vec<String> = set.into_iter().collect();
        v.push(EMPTY_LABEL.to_string());
        v
    }

    pub fn rows(&self) -> Vec<String> {
        self.labels(|k| &k.0)
    }

    pub fn cols(&self) -> Vec<String> {
        self.labels(|k| &k.1)
    }

    pub fn column_total(&self, gold: &str) -> usize {
        self.cells.iter().filter(|(k, _)| k.1 == gold).map(|(_, n)| n).sum()
    }

    pub fn merge(mut self, other: ConfusionMatrix) -> ConfusionMatrix {
        for (k, n) in other.cells {
            *self.cells.entry(k).or_insert(0) += n;
        }
        self
    }

    /// Rows are predicted labels, columns gold labels; the `∅`/`∅` cell is blank.
    pub fn to_tsv(&self) -> String {
        let cols = self.cols();
        let mut out = format!("pred\\gold\t{}\n", cols.join("\t"));
        for r in self.rows() {
            out.push_str(&r);
            for c in &cols {
                out.push('\t');
                if !(r == EMPTY_LABEL && c == EMPTY_LABEL) {
                    out.push_str(&self.get(&r, c).to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

fn confusion_pair(gold: &UccaPassage, pred: &UccaPassage, m: &mut ConfusionMatrix) {
    let g = top_labels(gold);
    let p = top_labels(pred);
    for (y, pl) in &p {
        let gl = g.get(y).cloned().unwrap_or_else(|| EMPTY_LABEL.to_string());
        *m.cells.entry((pl.clone(), gl)).or_insert(0) += 1;
    }
    for (y, gl) in &g {
        if !p.contains_key(y) {
            *m.cells.entry((EMPTY_LABEL.to_string(), gl.clone())).or_insert(0) += 1;
        }
    }
}

/// Confusion matrix over aligned passages.
pub fn confusion(gold: &[UccaPassage], pred: &[UccaPassage]) -> Result<ConfusionMatrix, EvalError> {
    let mut m = ConfusionMatrix::default();
    for (g, p) in align(gold, pred)? {
        confusion_pair(g, p, &mut m);
    }
    Ok(m)
}

/// Per-passage outcome, labeled, listing unmatched keys on both sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceReport {
    pub passage_id: String,
    pub primary: Counts,
    pub remote: Counts,
    pub missed: Vec<String>,
    pub spurious: Vec<String>,
}

pub fn report(gold: &[UccaPassage], pred: &[UccaPassage]) -> Result<Vec<SentenceReport>, EvalError> {
    let mut out = Vec::new();
    for (g, p) in align(gold, pred)? {
        let c = pair_counts(g, p, true);
        let mut pk = multiset(edge_keys(p));
        let mut missed = Vec::new();
        for k in edge_keys(g) {
            match pk.get_mut(&k) {
                Some(n) if *n > 0 => *n -= 1,
                _ => missed.push(k.to_string()),
            }
        }
        let mut spurious: Vec<String> = pk
            .into_iter()
            .flat_map(|(k, n)| std::iter::repeat_n(k.to_string(), n))
            .collect();
        spurious.sort();
        out.push(SentenceReport {
            passage_id: g.passage_id.clone(),
            primary: c[0],
            remote: c[1],
            missed,
            spurious,
        });
    }
    Ok(out)
}

pub fn report_to_tsv(rows: &[SentenceReport]) -> String {
    let mut out = String::from(
        "passage\tmatched\tgold\tpredicted\tremote_matched\tremote_gold\tremote_predicted\tmissed\tspurious\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.passage_id,
            r.primary.matched,
            r.primary.gold,
            r.primary.predicted,
            r.remote.matched,
            r.remote.gold,
            r.remote.predicted,
            r.missed.join(" "),
            r.spurious.join(" ")
        );
    }
    out
}
