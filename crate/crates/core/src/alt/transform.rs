//! Promotion of linkage-related dependents to siblings of their heads.

use crate::conllulex::Sentence;

const PROMOTED: [&str; 5] = ["cc", "advcl", "appos", "conj", "parataxis"];

fn depth(s: &Sentence, id: usize) -> usize {
    let mut d = 0;
    let mut cur = id;
    while cur != 0 && d <= s.tokens.len() {
        cur = s.tokens[cur - 1].head;
        d += 1;
    }
    d
}

fn promotable(s: &Sentence, id: usize) -> bool {
    let t = &s.tokens[id - 1];
    let rel = t.base_deprel();
    if PROMOTED.contains(&rel) {
        return true;
    }
    rel == "mark" && t.head != 0 && s.tokens[t.head - 1].base_deprel() == "advcl"
}

/// One pass: every eligible dependent not yet promoted moves up one level,
/// heads before their dependents. Returns whether anything changed.
fn pass(s: &mut Sentence, done: &mut [bool], warnings: &mut Vec<String>) -> bool {
    let mut order: Vec<usize> = (1..=s.tokens.len()).collect();
    order.sort_by_key(|&i| (depth(s, i), i));
    let mut changed = false;
    for id in order {
        if done[id - 1] || !promotable(s, id) {
            continue;
        }
        done[id - 1] = true;
        changed = true;
        let head = s.tokens[id - 1].head;
        if head == 0 || s.tokens[head - 1].head == 0 {
            warnings.push(format!("{}: token {id} depends on the root; not promoted", s.sent_id));
            continue;
        }
        s.tokens[id - 1].head = s.tokens[head - 1].head;
    }
    changed
}

/// Applies promotion passes to a fixpoint; each dependent moves at most once.
pub fn transform_dependencies_with_warnings(s: &Sentence) -> (Sentence, Vec<String>, usize) {
    let mut out = s.clone();
    let mut done = vec![false; out.tokens.len()];
    let mut warnings = Vec::new();
    let mut passes = 0;
    while pass(&mut out, &mut done, &mut warnings) {
        passes += 1;
    }
    (out, warnings, passes)
}

pub fn transform_dependencies(s: &Sentence) -> Sentence {
    let (out, warnings, _) = transform_dependencies_with_warnings(s);
    for w in warnings {
        log::debug!("{w}");
    }
    out
}
