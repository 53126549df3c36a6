//! One PASS/FAIL line per acceptance criterion.
//!
//! Criterion 3 needs the EWT Reviews corpus, located through environment
//! variables (see README); without it the line reports FAIL and the other
//! criteria still gate the test.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{fuzz_sentence, random_passage};
use ucca_convert::alt::{
    convert_alt, convert_alt_mode, postprocess, train_majority_mapping, AltMode, MajorityMapping, MappingEntry,
};
use ucca_convert::conllulex::{parse_str, Sentence, Token};
use ucca_convert::eval::{confusion, score, score_bruteforce};
use ucca_convert::rule::{convert, convert_traced, convert_with_notes};
use ucca_convert::ucca::{bracket_string, normalize_bracket, parse_xml_all, validate, Category, Terminal, UccaPassage};
use ucca_convert::LexiconSet;

fn data(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)).unwrap()
}

type Outcome = Result<String, String>;

fn golden_trace() -> Outcome {
    let start = Instant::now();
    let doc = parse_str(&data("running_example.conllulex"), true).map_err(|e| e.to_string())?;
    let (passage, trace) = convert_traced(&doc.sentences[0], &LexiconSet::builtin()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = data("running_example.trace");
    let mut checked = 0;
    for line in expected.lines() {
        let (name, want) = line.split_once('\t').ok_or("bad trace file")?;
        let got = trace
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.clone())
            .ok_or(format!("stage {name} missing"))?;
        if normalize_bracket(&got) != normalize_bracket(want) {
            return Err(format!("stage {name} differs: {got}"));
        }
        checked += 1;
    }
    let last = expected
        .lines()
        .last()
        .and_then(|l| l.split_once('\t'))
        .map(|x| x.1)
        .unwrap_or("");
    if normalize_bracket(&bracket_string(&passage)) != normalize_bracket(last) {
        return Err("final passage differs".into());
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{checked} stages match, {elapsed:?}"))
}

fn second_example() -> Outcome {
    let doc = parse_str(&data("fig2.conllulex"), true).map_err(|e| e.to_string())?;
    let p = convert(&doc.sentences[0], &LexiconSet::builtin()).map_err(|e| e.to_string())?;
    let want = "[H [A Blue cross] [S has] [A [D no] [C record] [E [R of] [F aa] [P reversal]]] [U .]]";
    let got = bracket_string(&p);
    if got == want && validate(&p).is_empty() {
        Ok("exact match".into())
    } else {
        Err(got)
    }
}

fn env_path(var: &str) -> Result<PathBuf, String> {
    std::env::var_os(var)
        .map(PathBuf::from)
        .ok_or(format!("corpus not available (set {var})"))
}

fn read_sentences(path: &Path) -> Result<Vec<Sentence>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_str(&text, false).map_err(|e| e.to_string())?.sentences)
}

fn read_gold(path: &Path) -> Result<Vec<UccaPassage>, String> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "xml"))
            .collect();
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for f in files {
        let text = fs::read_to_string(&f).map_err(|e| format!("{}: {e}", f.display()))?;
        out.extend(
            parse_xml_all(&text)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|x| x.passage),
        );
    }
    Ok(out)
}

/// Gold passages keyed by sentence id when ids agree, else paired in order.
fn pair_gold(sents: &[Sentence], gold: Vec<UccaPassage>) -> Result<Vec<(Sentence, UccaPassage)>, String> {
    let mut by_id: BTreeMap<String, UccaPassage> = gold.iter().map(|p| (p.passage_id.clone(), p.clone())).collect();
    let ids_agree = sents.iter().all(|s| by_id.contains_key(&s.sent_id));
    if !ids_agree && gold.len() != sents.len() {
        return Err(format!("{} sentences but {} gold passages", sents.len(), gold.len()));
    }
    let mut out = Vec::new();
    for (i, s) in sents.iter().enumerate() {
        let mut g = if ids_agree {
            by_id.remove(&s.sent_id).unwrap()
        } else {
            gold[i].clone()
        };
        if g.terminals.len() != s.tokens.len() {
            return Err(format!("{}: tokenization differs from gold", s.sent_id));
        }
        g.passage_id = s.sent_id.clone();
        out.push((s.clone(), g));
    }
    Ok(out)
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn corpus_reproduction() -> Outcome {
    let start = Instant::now();
    let lex = LexiconSet::builtin();
    let dev = pair_gold(
        &read_sentences(&env_path("UCCA_DEV_CONLLULEX")?)?,
        read_gold(&env_path("UCCA_DEV_GOLD")?)?,
    )?;
    let train = pair_gold(
        &read_sentences(&env_path("UCCA_TRAIN_CONLLULEX")?)?,
        read_gold(&env_path("UCCA_TRAIN_GOLD")?)?,
    )?;
    let gold: Vec<UccaPassage> = dev.iter().map(|(_, g)| g.clone()).collect();
    let rule: Vec<UccaPassage> = dev
        .iter()
        .map(|(s, _)| convert(s, &lex).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mapping = train_majority_mapping(&train);
    let baseline: Vec<UccaPassage> = dev
        .iter()
        .map(|(s, _)| convert_alt_mode(s, &mapping, &lex, AltMode::SyntaxOnly))
        .collect();
    let r = score(&gold, &rule, true).map_err(|e| e.to_string())?;
    let b = score(&gold, &baseline, true).map_err(|e| e.to_string())?;
    let m = confusion(&gold, &rule).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let cells = [("F", 613usize), ("A", 758)];
    let summary = format!(
        "rule {:.1}/{:.1}, baseline {:.1}/{:.1}, (F,F)={}, (A,A)={}, {elapsed:?}",
        100.0 * r.primary.f1,
        100.0 * r.remote.f1,
        100.0 * b.primary.f1,
        100.0 * b.remote.f1,
        m.get("F", "F"),
        m.get("A", "A")
    );
    let ok = within(r.primary.f1, 0.717, 0.015)
        && within(r.remote.f1, 0.442, 0.030)
        && within(b.primary.f1, 0.566, 0.020)
        && within(b.remote.f1, 0.280, 0.030)
        && cells
            .iter()
            .all(|&(c, want)| within(m.get(c, c) as f64, want as f64, 0.05 * want as f64))
        && elapsed < Duration::from_secs(60);
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn metric_properties() -> Outcome {
    let mut pairs = 0;
    for seed in 0..500u64 {
        let n = 1 + (seed as usize % 12);
        let g = vec![random_passage(seed, "x", n, 0.4)];
        let p = vec![random_passage(seed + 100_000, "x", n, 0.4)];
        let own = score(&g, &g, true).unwrap();
        let perfect = |c: ucca_convert::eval::Counts| c.gold == 0 || (c.matched == c.gold && c.predicted == c.gold);
        if !perfect(own.primary.counts) || !perfect(own.remote.counts) {
            return Err(format!("self-match below 1.0 for seed {seed}"));
        }
        if own.primary.counts.gold > 0 && own.primary.f1 != 1.0 {
            return Err(format!("self-match F1 {} for seed {seed}", own.primary.f1));
        }
        for labeled in [true, false] {
            let fwd = score(&g, &p, labeled).unwrap();
            let back = score(&p, &g, labeled).unwrap();
            if fwd.primary.precision != back.primary.recall || fwd.remote.precision != back.remote.recall {
                return Err(format!("asymmetric for seed {seed}"));
            }
        }
        let l = score(&g, &p, true).unwrap();
        let u = score(&g, &p, false).unwrap();
        if l.primary.f1 > u.primary.f1 + 1e-12 || l.remote.f1 > u.remote.f1 + 1e-12 {
            return Err(format!("labeled exceeds unlabeled for seed {seed}"));
        }
        if seed < 200 {
            for labeled in [true, false] {
                if score(&g, &p, labeled).unwrap() != score_bruteforce(&g, &p, labeled).unwrap() {
                    return Err(format!("scorer disagrees with oracle for seed {seed}"));
                }
            }
        }
        pairs += 1;
    }
    Ok(format!("{pairs} random pairs"))
}

fn structural_properties() -> Outcome {
    let lex = LexiconSet::builtin();
    let train: Vec<(Sentence, UccaPassage)> = (0..50u64)
        .map(|i| {
            let s = fuzz_sentence(i + 1_000_000, 9);
            let p = convert(&s, &lex).unwrap();
            (s, p)
        })
        .collect();
    let mapping = train_majority_mapping(&train);
    for seed in 0..1000u64 {
        let s = fuzz_sentence(seed, 1 + (seed as usize % 20));
        let (p, notes) = convert_with_notes(&s, &lex).map_err(|e| format!("seed {seed}: {e}"))?;
        if !validate(&p).is_empty() {
            return Err(format!("seed {seed}: rule output invalid {:?}", validate(&p)));
        }
        if notes.iter().any(|n| n.contains("working label")) {
            return Err(format!("seed {seed}: residual working labels {notes:?}"));
        }
        for m in [&mapping, &MajorityMapping::default()] {
            let q = convert_alt(&s, m, &lex);
            if !validate(&q).is_empty() {
                return Err(format!("seed {seed}: alt output invalid {:?}", validate(&q)));
            }
        }
    }
    for seed in 0..500u64 {
        let p = random_passage(seed, "p", 1 + (seed as usize % 14), 0.3);
        let once = postprocess(&p);
        if postprocess(&once) != once || !validate(&once).is_empty() {
            return Err(format!("postprocess not idempotent for seed {seed}"));
        }
    }
    Ok("1000 sentences, 500 passages".into())
}

fn token(id: usize, head: usize, deprel: &str) -> Token {
    Token {
        id,
        form: format!("w{id}"),
        lemma: format!("w{id}"),
        upos: "X".into(),
        head,
        deprel: deprel.into(),
        ..Token::default()
    }
}

/// Ten three-token sentences (subject, predicate, object) with known
/// category counts, plus a wrapping unit over the first two tokens in even
/// sentences that must not be mistaken for the minimal unit.
fn synthetic_corpus() -> (Vec<(Sentence, UccaPassage)>, BTreeMap<String, MappingEntry>) {
    use Category::*;
    let subj = [A, A, A, A, A, A, A, D, D, D];
    let pred = [P, P, P, P, P, P, S, S, S, S];
    let obj = [E, A, E, A, E, A, E, A, E, A];
    let mut pairs = Vec::new();
    for i in 0..10 {
        let s = Sentence::new(
            format!("syn{i}"),
            vec![token(1, 2, "nsubj"), token(2, 0, "root"), token(3, 2, "obj")],
        );
        let mut p = UccaPassage::new(
            format!("syn{i}"),
            (1..=3)
                .map(|t| Terminal {
                    text: format!("w{t}"),
                    punct: false,
                })
                .collect(),
        );
        let top = if i % 2 == 0 {
            p.add_unit("1.9", BTreeSet::new());
            p.add_edge("1.1", "1.9", H.into(), false);
            "1.9"
        } else {
            "1.1"
        };
        for (t, c) in [(1, subj[i]), (2, pred[i])] {
            let id = format!("1.{}", t + 1);
            p.add_unit(id.clone(), [t].into_iter().collect());
            p.add_edge(top, &id, c.into(), false);
        }
        p.add_unit("1.4", [3].into_iter().collect());
        p.add_edge("1.1", "1.4", obj[i].into(), false);
        pairs.push((s, p));
    }
    let expected = [
        (
            "nsubj",
            MappingEntry {
                category: A,
                count: 7,
                total: 10,
            },
        ),
        (
            "root",
            MappingEntry {
                category: P,
                count: 6,
                total: 10,
            },
        ),
        (
            "obj",
            MappingEntry {
                category: A,
                count: 5,
                total: 10,
            },
        ),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    (pairs, expected)
}

/// Independent recount: the category of the smallest enclosing unit (deepest
/// on ties), by exhaustive search over units and explicit yield recursion.
fn recount(pairs: &[(Sentence, UccaPassage)]) -> BTreeMap<String, MappingEntry> {
    fn yield_of(p: &UccaPassage, u: &str) -> Vec<usize> {
        let mut v: Vec<usize> = p.units[u].anchors.iter().copied().collect();
        for e in p.edges.iter().filter(|e| !e.remote && e.parent == u) {
            v.extend(yield_of(p, &e.child));
        }
        v
    }
    fn depth_of(p: &UccaPassage, u: &str) -> usize {
        p.edges
            .iter()
            .find(|e| !e.remote && e.child == u)
            .map_or(0, |e| 1 + depth_of(p, &e.parent))
    }
    let mut counts: BTreeMap<String, Vec<(Category, usize)>> = BTreeMap::new();
    let mut totals: BTreeMap<String, usize> = BTreeMap::new();
    for (s, p) in pairs {
        for t in &s.tokens {
            let mut best: Option<(usize, usize, String)> = None;
            for u in p.units.keys().filter(|u| **u != p.root) {
                let y = yield_of(p, u);
                if !y.contains(&t.id) {
                    continue;
                }
                let cand = (y.len(), usize::MAX - depth_of(p, u), u.clone());
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            let Some((_, _, u)) = best else { continue };
            *totals.entry(t.deprel.clone()).or_default() += 1;
            let row = counts.entry(t.deprel.clone()).or_default();
            let e = p.edges.iter().find(|e| !e.remote && e.child == u).unwrap();
            for c in e.categories.iter() {
                match row.iter_mut().find(|(x, _)| *x == c) {
                    Some((_, n)) => *n += 1,
                    None => row.push((c, 1)),
                }
            }
        }
    }
    counts
        .into_iter()
        .map(|(rel, row)| {
            let max = row.iter().map(|x| x.1).max().unwrap();
            let category = row
                .iter()
                .filter(|x| x.1 == max)
                .map(|x| x.0)
                .min_by_key(|c| c.code())
                .unwrap();
            let total = totals[&rel];
            (
                rel,
                MappingEntry {
                    category,
                    count: max,
                    total,
                },
            )
        })
        .collect()
}

fn mapping_oracle() -> Outcome {
    let (pairs, expected) = synthetic_corpus();
    let trained = train_majority_mapping(&pairs).table;
    let oracle = recount(&pairs);
    if trained != expected {
        return Err(format!("trained {trained:?}, expected {expected:?}"));
    }
    if oracle != expected {
        return Err(format!("oracle {oracle:?}, expected {expected:?}"));
    }
    Ok("3 relations, exact".into())
}

type Criterion = (u8, &'static str, fn() -> Outcome, bool);

#[test]
fn acceptance() {
    let corpus_given = std::env::var_os("UCCA_DEV_CONLLULEX").is_some();
    let criteria: [Criterion; 6] = [
        (1, "golden trace of the running example", golden_trace, true),
        (2, "second example output", second_example, true),
        (3, "corpus reproduction", corpus_reproduction, corpus_given),
        (4, "metric properties", metric_properties, true),
        (5, "structural properties", structural_properties, true),
        (6, "majority mapping oracle", mapping_oracle, true),
    ];
    let mut failed = Vec::new();
    for (n, name, run, gating) in criteria {
        match run() {
            Ok(detail) => println!("criterion {n} PASS: {name} ({detail})"),
            Err(detail) => {
                println!("criterion {n} FAIL: {name} ({detail})");
                if gating {
                    failed.push(n);
                }
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
