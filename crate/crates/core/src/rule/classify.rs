//! Preprocessing, unit creation and scene-evocation classification.

use std::collections::{BTreeSet, VecDeque};

use crate::conllulex::{group_lexical_expressions, LexExpr, MweRef, Sentence, Strength};
use crate::lexicons::{LexiconSet, RelationalKind};
use crate::ucca::{Category, CategorySet};

use super::graph::{Label, Unit, WorkGraph};
use super::RuleError;

/// Separates the trailing preposition of an idiomatic prepositional verb from
/// the expression; the rest is relabeled as a particle or light-verb construction.
pub fn split_iav(mut s: Sentence) -> Sentence {
    let groups: BTreeSet<u32> = s.tokens.iter().filter_map(|t| t.smwe.map(|m| m.group)).collect();
    for g in groups {
        let members: Vec<usize> = s
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.smwe.map(|m| m.group) == Some(g))
            .map(|(i, _)| i)
            .collect();
        let first = members[0];
        if s.tokens[first].lexcat.as_deref() != Some("V.IAV") || members.len() < 2 {
            continue;
        }
        let last = *members.last().unwrap_or(&first);
        if s.tokens[last].upos != "ADP" {
            continue;
        }
        let prep = &mut s.tokens[last];
        prep.smwe = None;
        prep.lexcat = Some("P".into());
        prep.lexlemma = Some(prep.lemma.clone());
        prep.ss = None;
        prep.ss2 = None;
        let rest = &members[..members.len() - 1];
        if rest.len() == 1 {
            let t = &mut s.tokens[rest[0]];
            t.smwe = None;
            t.lexcat = Some("V".into());
            t.lexlemma = Some(t.lemma.clone());
            continue;
        }
        let particle = rest.iter().any(|&i| s.tokens[i].deprel == "compound:prt");
        let lexlemma = rest
            .iter()
            .map(|&i| s.tokens[i].lemma.clone())
            .collect::<Vec<_>>()
            .join(" ");
        let t = &mut s.tokens[first];
        t.lexcat = Some(if particle { "V.VPC.full" } else { "V.LVC.full" }.into());
        t.lexlemma = Some(lexlemma);
        for (pos, &i) in rest.iter().enumerate() {
            s.tokens[i].smwe = Some(MweRef {
                group: g,
                position: pos as u32 + 1,
            });
        }
    }
    s
}

/// True when collapsing `toks` into one node would create a cycle: some path
/// upward from a member leaves the set and later re-enters it.
pub(crate) fn mwe_cycles(s: &Sentence, toks: &[usize]) -> bool {
    let n = s.tokens.len();
    for &t in toks {
        let mut cur = s.tokens[t - 1].head;
        let mut left = false;
        let mut steps = 0;
        while cur != 0 && steps <= n {
            if toks.contains(&cur) {
                if left {
                    return true;
                }
            } else {
                left = true;
            }
            cur = s.tokens[cur - 1].head;
            steps += 1;
        }
    }
    false
}

/// One provisional unit per strong lexical expression. Light verbs of
/// light-verb constructions become `F` (or `D` for causatives) leaves inside
/// a `+` unit; punctuation becomes `U` leaves under the root.
pub fn init_units(s: Sentence) -> Result<WorkGraph, RuleError> {
    let exprs = group_lexical_expressions(&s)?;
    let mut g = WorkGraph::empty(s);
    let mut strong: Vec<LexExpr> = Vec::new();
    for e in exprs.into_iter().filter(|e| e.is_strong()) {
        if e.tokens.len() > 1 && mwe_cycles(&g.sentence, &e.tokens) {
            g.notes
                .push(format!("multiword expression at {:?} discarded: cyclic", e.tokens));
            for &t in &e.tokens {
                let tok = &g.sentence.tokens[t - 1];
                strong.push(LexExpr {
                    tokens: vec![t],
                    strength: Strength::Single,
                    lexcat: tok.upos.clone(),
                    ss: None,
                    ss2: None,
                });
            }
        } else {
            strong.push(e);
        }
    }
    strong.sort_by_key(|e| e.tokens[0]);
    for e in strong {
        let idx = g.units.len();
        for &t in &e.tokens {
            g.unit_of[t - 1] = idx;
        }
        let punct = e.tokens.iter().all(|&t| g.sentence.tokens[t - 1].is_punct());
        let root = g.root;
        if punct {
            let leaf = g.new_node(Label::cat(Category::U), e.tokens.clone());
            g.move_under(leaf, root);
            g.units.push(Unit {
                node: leaf,
                una: leaf,
                tokens: e.tokens.clone(),
                expr: e,
                punct: true,
                lvc: false,
                scene: false,
                attached: true,
            });
            continue;
        }
        let lvc_cat = match e.lexcat.as_str() {
            "V.LVC.full" => Some(Category::F),
            "V.LVC.cause" => Some(Category::D),
            _ => None,
        };
        let verbs: Vec<usize> = e
            .tokens
            .iter()
            .copied()
            .filter(|&t| matches!(g.sentence.tokens[t - 1].upos.as_str(), "VERB" | "AUX"))
            .collect();
        let unit_node = g.new_node(Label::Unset, Vec::new());
        g.move_under(unit_node, root);
        let mut lvc = false;
        let una = match lvc_cat {
            Some(cat) if !verbs.is_empty() && verbs.len() < e.tokens.len() => {
                lvc = true;
                g.nodes[unit_node].label = Label::Plus;
                let light = g.new_node(Label::cat(cat), verbs.clone());
                g.move_under(light, unit_node);
                let rest: Vec<usize> = e.tokens.iter().copied().filter(|t| !verbs.contains(t)).collect();
                let una = g.new_node(Label::Una, rest);
                g.move_under(una, unit_node);
                una
            }
            _ => {
                let una = g.new_node(Label::Una, e.tokens.clone());
                g.move_under(una, unit_node);
                una
            }
        };
        g.units.push(Unit {
            node: unit_node,
            una,
            tokens: e.tokens.clone(),
            expr: e,
            punct: false,
            lvc,
            scene: false,
            attached: false,
        });
    }
    Ok(g)
}

const CLAUSE_DEPS: [&str; 14] = [
    "nsubj",
    "csubj",
    "aux",
    "cop",
    "mark",
    "advmod",
    "advcl",
    "obl",
    "conj",
    "cc",
    "punct",
    "parataxis",
    "discourse",
    "expl",
];

/// Makes `new_head` govern `old_head`: `new_head` takes over the attachment
/// of `old_head` and its clause-level dependents.
fn promote(g: &mut WorkGraph, old_head: usize, new_head: usize, demoted_rel: &str) {
    let (h, rel) = {
        let t = g.token(old_head);
        (t.head, t.deprel.clone())
    };
    {
        let t = &mut g.sentence.tokens[new_head - 1];
        t.head = h;
        t.deprel = rel;
    }
    {
        let t = &mut g.sentence.tokens[old_head - 1];
        t.head = new_head;
        t.deprel = demoted_rel.to_string();
    }
    for i in 0..g.sentence.tokens.len() {
        let t = &g.sentence.tokens[i];
        if t.head == old_head && t.id != new_head && CLAUSE_DEPS.contains(&t.base_deprel()) {
            g.sentence.tokens[i].head = new_head;
        }
    }
}

fn dependents_with(g: &WorkGraph, u: usize, rel: &str) -> Vec<usize> {
    g.dependents(u).into_iter().filter(|&v| g.base_rel(v) == rel).collect()
}

enum NounClass {
    Scene(Category),
    Relational(RelationalKind),
    Plain,
}

fn noun_class(g: &WorkGraph, u: usize, lex: &LexiconSet) -> NounClass {
    let ss = g.ss(u).unwrap_or("").to_lowercase();
    let lemma = g.lemma(u);
    match ss.as_str() {
        "n.attribute" | "n.feeling" | "n.state" => NounClass::Scene(Category::S),
        "n.act" | "n.phenomenon" | "n.process" | "n.event" => {
            if lex.is_part_of_day(&lemma) {
                NounClass::Plain
            } else {
                NounClass::Scene(Category::P)
            }
        }
        _ => match lex.relational_kind(&lemma, Some(&ss)) {
            Some(k) => NounClass::Relational(k),
            None => NounClass::Plain,
        },
    }
}

fn set_label(g: &mut WorkGraph, u: usize, label: Label) {
    let n = g.units[u].node;
    g.nodes[n].label = label;
}

fn label_noun(g: &mut WorkGraph, u: usize, lex: &LexiconSet) {
    match noun_class(g, u, lex) {
        NounClass::Scene(c) => set_label(g, u, Label::cat(c)),
        NounClass::Relational(kind) => {
            set_label(g, u, Label::Minus);
            let inner = match kind {
                RelationalKind::State => CategorySet::from_slice(&[Category::A, Category::S]),
                RelationalKind::Process => CategorySet::from_slice(&[Category::A, Category::P]),
            };
            let una = g.units[u].una;
            g.wrap(una, Label::Relational(inner));
        }
        NounClass::Plain => set_label(g, u, Label::Minus),
    }
}

fn is_nominal(pos: &str) -> bool {
    matches!(pos, "NOUN" | "PROPN" | "PRON" | "NUM")
}

/// Labels one unit; may restructure the dependency tree. Returns a unit that
/// must be visited next (a newly promoted head).
fn classify_unit(g: &mut WorkGraph, u: usize, lex: &LexiconSet) -> Option<usize> {
    if g.nodes[g.units[u].node].label != Label::Unset {
        return None;
    }
    let pos = g.pos(u);
    let lemma = g.lemma(u);
    let top = g.top_token(u);
    let deprel = g.token(top).base_deprel().to_string();
    let ss = g.ss(u).map(str::to_lowercase);

    if pos == "ADJ" {
        let label = if lex.is_quantity_adj(&lemma) {
            Label::Minus
        } else {
            Label::cat(Category::S)
        };
        set_label(g, u, label);
        return None;
    }
    if lemma == "there" && deprel == "expl" {
        set_label(g, u, Label::cat(Category::S));
        return None;
    }
    if lemma == "be" {
        if let Some(&there) = dependents_with(g, u, "expl").iter().find(|&&v| g.lemma(v) == "there") {
            set_label(g, u, Label::Minus);
            set_label(g, there, Label::cat(Category::S));
            let t = g.top_token(there);
            promote(g, top, t, "cop");
            return Some(there);
        }
    }
    let cops = dependents_with(g, u, "cop");
    if pos == "ADV" && deprel != "discourse" && !cops.is_empty() {
        set_label(g, u, Label::cat(Category::S));
        return None;
    }
    if lemma == "thanks" || lemma == "thank" || g.units[u].expr.tokens.len() > 1 && lemma.starts_with("thank") {
        set_label(g, u, Label::cat(Category::P));
        return None;
    }
    if pos == "ADP" && !cops.is_empty() {
        let special = ss.as_deref().is_some_and(|s| s.starts_with('`'));
        set_label(g, u, if special { Label::Minus } else { Label::cat(Category::S) });
        return None;
    }
    if is_nominal(&pos) && !cops.is_empty() {
        let cases = dependents_with(g, u, "case");
        if let Some(&prep) = cases.first() {
            let special = g.ss(prep).is_some_and(|s| s.starts_with('`'));
            if !special {
                set_label(g, prep, Label::cat(Category::S));
                let pt = g.top_token(prep);
                promote(g, top, pt, "pred");
                finish_nominal(g, u, &pos, lex);
                return Some(prep);
            }
        } else {
            let scene = pos == "NOUN" && matches!(noun_class(g, u, lex), NounClass::Scene(_));
            if !scene {
                let cop = cops[0];
                set_label(g, cop, Label::cat(Category::S));
                let ct = g.top_token(cop);
                promote(g, top, ct, "pred");
                finish_nominal(g, u, &pos, lex);
                return Some(cop);
            }
        }
    }
    finish_nominal(g, u, &pos, lex);
    None
}

/// Remaining cascade: nouns, verbs, everything else.
fn finish_nominal(g: &mut WorkGraph, u: usize, pos: &str, lex: &LexiconSet) {
    if g.nodes[g.units[u].node].label != Label::Unset {
        return;
    }
    if pos == "NOUN" {
        label_noun(g, u, lex);
        return;
    }
    let lemma = g.lemma(u);
    let deprel = g.base_rel(u).to_string();
    if pos == "VERB" || (lemma == "be" && deprel != "cop" && deprel != "aux") {
        set_label(g, u, Label::Plus);
        return;
    }
    set_label(g, u, Label::Minus);
}

/// Top-down pass assigning `+`, `-`, `S`, `P` (or a relational wrapper) to every unit.
pub fn classify_main_relations(mut g: WorkGraph, lex: &LexiconSet) -> WorkGraph {
    let mut visited = vec![false; g.units.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    loop {
        let next = match queue.pop_front() {
            Some(u) => u,
            None => match g.units_top_down().into_iter().find(|&u| !visited[u]) {
                Some(u) => u,
                None => break,
            },
        };
        if visited[next] {
            continue;
        }
        visited[next] = true;
        if let Some(promoted) = classify_unit(&mut g, next, lex) {
            queue.push_front(promoted);
        }
        for v in g.dependents(next) {
            if !visited[v] {
                queue.push_back(v);
            }
        }
    }
    for u in 0..g.units.len() {
        let label = &g.nodes[g.units[u].node].label;
        g.units[u].scene = !g.units[u].punct && label.is_scene();
    }
    g
}
