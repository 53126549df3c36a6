use std::collections::{BTreeSet, HashMap};

use super::UccaPassage;

fn forms(p: &UccaPassage, toks: &BTreeSet<usize>) -> String {
    toks.iter()
        .filter_map(|t| p.terminals.get(t - 1).map(|x| x.text.as_str()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render(p: &UccaPassage, u: &str, yields: &HashMap<String, BTreeSet<usize>>, out: &mut Vec<String>) {
    let mut kids: Vec<_> = p.outgoing(u).collect();
    kids.sort_by_key(|e| {
        let y = &yields[&e.child];
        (y.iter().next().copied().unwrap_or(usize::MAX), e.remote, e.categories)
    });
    for e in kids {
        let y = &yields[&e.child];
        if e.remote {
            out.push(format!("[{}* {}]", e.categories, forms(p, y)));
        } else if p.is_leaf(&e.child) {
            out.push(format!("[{} {}]", e.categories, forms(p, y)));
        } else {
            let mut inner = Vec::new();
            render(p, &e.child, yields, &mut inner);
            out.push(format!("[{} {}]", e.categories, inner.join(" ")));
        }
    }
}

/// Bracketed rendering of a passage: the root's children left to right.
pub fn bracket_string(p: &UccaPassage) -> String {
    let yields = p.yields();
    if p.is_leaf(&p.root) {
        return forms(p, &yields[&p.root]);
    }
    let mut parts = Vec::new();
    render(p, &p.root, &yields, &mut parts);
    parts.join(" ")
}

/// Collapses whitespace and removes spaces just inside brackets, so hand-typed
/// bracketings compare equal to rendered ones.
pub fn normalize_bracket(s: &str) -> String {
    let collapsed = s.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.replace(" ]", "]").replace("[ ", "[")
}
