//! Late steps: state/process resolution, secondary verbs, head articulation, cleanup.

use std::collections::BTreeSet;

use crate::lexicons::LexiconSet;
use crate::ucca::{Category, CategorySet};

use super::graph::{Label, NodeId, WorkGraph};
use super::RuleError;

const PROCESS_NOUN_SS: [&str; 4] = ["n.act", "n.phenomenon", "n.process", "n.event"];

/// Every `+` unit becomes `S` (copula, stative `have`) or `P`.
pub fn resolve_scene_category(mut g: WorkGraph, _lex: &LexiconSet) -> Result<WorkGraph, RuleError> {
    for u in 0..g.units.len() {
        let n = g.units[u].node;
        if g.nodes[n].label != Label::Plus {
            continue;
        }
        let lemma = g.lemma(u);
        let ss = g.ss(u).unwrap_or("").to_lowercase();
        let pos = g.pos(u);
        let c = if g.units[u].lvc {
            Category::P
        } else if lemma == "be" || (lemma == "have" && ss == "v.stative") {
            Category::S
        } else if matches!(pos.as_str(), "VERB" | "AUX") || PROCESS_NOUN_SS.contains(&ss.as_str()) {
            Category::P
        } else {
            return Err(RuleError::Unresolved {
                sent_id: g.sentence.sent_id.clone(),
                unit: g.units[u].tokens.clone(),
            });
        };
        g.nodes[n].label = Label::cat(c);
    }
    Ok(g)
}

fn direct_una(g: &WorkGraph, n: NodeId) -> Option<NodeId> {
    g.nodes[n]
        .children
        .iter()
        .copied()
        .find(|&c| g.nodes[c].label == Label::Una)
}

/// Secondary-verb constructions: the head verb becomes `D` inside the
/// complement's scene.
pub fn restructure_secondary_verbs(mut g: WorkGraph, _lex: &LexiconSet) -> WorkGraph {
    while let Some(w) = g.preorder().into_iter().find(|&n| g.nodes[n].label == Label::Caret) {
        let Some(s) = g.nodes[w].parent else { break };
        if let Some(una) = direct_una(&g, s) {
            g.wrap(una, Label::cat(Category::D));
        }
        let dep = g.nodes[w].children.first().copied();
        match dep {
            Some(d) if matches!(g.nodes[d].label, Label::Coord(_)) => {
                g.splice(w);
            }
            Some(d) => {
                g.nodes[s].label = g.nodes[d].label.clone();
                g.splice(w);
                g.splice(d);
            }
            None => g.kill(w, None),
        }
    }
    g
}

fn quantity_of(g: &WorkGraph, n: NodeId, lex: &LexiconSet) -> bool {
    let Some(u) = g.units.iter().position(|u| u.node == n) else {
        return false;
    };
    let ss = g.ss(u).unwrap_or("").to_lowercase();
    let quantity = ss == "n.quantity" || lex.is_quantity_adj(&g.lemma(u));
    quantity
        && g.dependents(u).into_iter().any(|v| {
            g.base_rel(v) == "nmod"
                && g.dependents(v)
                    .into_iter()
                    .any(|c| g.base_rel(c) == "case" && g.lemma(c) == "of")
        })
}

/// Marks scene units `H(...)` and gives the lexical leaf of multi-child units
/// its own category.
pub fn articulate_heads(mut g: WorkGraph, lex: &LexiconSet) -> WorkGraph {
    for n in g.preorder() {
        let label = g.nodes[n].label.clone();
        match label {
            Label::Cats(x) if x.is_scene_head() => match direct_una(&g, n) {
                Some(una) => {
                    let scene_part: CategorySet =
                        x.iter()
                            .filter(|c| c.is_scene_head())
                            .fold(CategorySet::EMPTY, |mut acc, c| {
                                acc.insert(c);
                                acc
                            });
                    let suffix = (scene_part != x).then_some(scene_part);
                    g.nodes[n].label = Label::HDecor { inner: x, suffix };
                    g.wrap(una, Label::Cats(x));
                }
                None => g.nodes[n].label = Label::cat(Category::H),
            },
            Label::Relational(r) => {
                g.nodes[n].label = Label::HDecor {
                    inner: r,
                    suffix: Some(r),
                };
                if let Some(una) = direct_una(&g, n) {
                    g.wrap(una, Label::Cats(r));
                }
            }
            Label::Cats(_) | Label::Minus => {
                if g.nodes[n].children.len() < 2 {
                    continue;
                }
                if let Some(una) = direct_una(&g, n) {
                    let c = if quantity_of(&g, n, lex) {
                        Category::Q
                    } else {
                        Category::C
                    };
                    g.wrap(una, Label::cat(c));
                }
            }
            _ => {}
        }
    }
    g
}

fn parent_label(g: &WorkGraph, n: NodeId) -> Label {
    g.nodes[n]
        .parent
        .map(|p| g.nodes[p].label.clone())
        .unwrap_or(Label::Root)
}

fn remove_decorations(g: &mut WorkGraph) {
    for n in g.preorder() {
        let new = match &g.nodes[n].label {
            Label::HDecor { suffix: Some(_), .. } => Label::cat(Category::C),
            Label::HDecor { suffix: None, .. } => Label::cat(Category::H),
            Label::Plus => Label::cat(Category::P),
            _ => continue,
        };
        g.nodes[n].label = new;
    }
    for n in g.preorder() {
        if g.nodes[n].label != Label::Minus {
            continue;
        }
        let c = match parent_label(g, n) {
            Label::Root => Category::H,
            Label::Coord(inner) if !inner.is_scene() => Category::C,
            p if p.is_scene() => Category::A,
            _ => Category::E,
        };
        g.nodes[n].label = Label::cat(c);
    }
}

fn neighbours(g: &WorkGraph, t: usize) -> (Option<usize>, Option<usize>) {
    let word = |i: usize| !g.token(i).is_punct();
    let n = g.sentence.tokens.len();
    let left = (1..t).rev().find(|&i| word(i));
    let right = (t + 1..=n).find(|&i| word(i));
    (left, right)
}

fn leaf_of(g: &WorkGraph, t: usize) -> Option<NodeId> {
    g.preorder().into_iter().find(|&n| g.nodes[n].tokens.contains(&t))
}

fn is_preterminal(g: &WorkGraph, n: NodeId) -> bool {
    let kids = &g.nodes[n].children;
    kids.len() == 1 && g.is_leaf(kids[0])
}

/// Each punctuation leaf moves under the smallest unit spanning both
/// neighbouring words.
fn move_punctuation(g: &mut WorkGraph) {
    let root = g.root;
    let puncts: Vec<NodeId> = g.nodes[root]
        .children
        .iter()
        .copied()
        .filter(|&c| g.nodes[c].label.is(Category::U))
        .collect();
    let sole_non_u = || {
        let others: Vec<NodeId> = g.nodes[root]
            .children
            .iter()
            .copied()
            .filter(|&c| !g.nodes[c].label.is(Category::U))
            .collect();
        (others.len() == 1).then(|| others[0])
    };
    let fallback = sole_non_u().filter(|&n| !g.is_leaf(n));
    let mut moves = Vec::new();
    for p in puncts {
        let t = g.nodes[p].tokens[0];
        let target = match neighbours(g, t) {
            (Some(l), Some(r)) => {
                let (Some(a), Some(b)) = (leaf_of(g, l), leaf_of(g, r)) else {
                    continue;
                };
                let anc_a: Vec<NodeId> = g.ancestors(a);
                let anc_b: BTreeSet<NodeId> = g.ancestors(b).into_iter().collect();
                let mut lca = anc_a.into_iter().find(|x| anc_b.contains(x)).unwrap_or(root);
                while lca != root && is_preterminal(g, lca) {
                    lca = g.nodes[lca].parent.unwrap_or(root);
                }
                if lca == root {
                    fallback.unwrap_or(root)
                } else {
                    lca
                }
            }
            _ => fallback.unwrap_or(root),
        };
        moves.push((p, target));
    }
    for (p, target) in moves {
        g.move_under(p, target);
    }
}

fn resolve_coordination(g: &mut WorkGraph) {
    for n in g.preorder() {
        let Label::Coord(inner) = g.nodes[n].label.clone() else {
            continue;
        };
        if inner.is_scene() {
            g.nodes[n].label = Label::cat(Category::H);
            continue;
        }
        let base = match *inner {
            Label::Cats(c) => Label::Cats(c),
            _ => match parent_label(g, n) {
                Label::Root => Label::cat(Category::H),
                p if p.is_scene() => Label::cat(Category::A),
                _ => Label::cat(Category::E),
            },
        };
        g.nodes[n].label = base;
        for c in g.nodes[n].children.clone() {
            let keep = g.nodes[c]
                .label
                .cats()
                .is_some_and(|s| s.contains(Category::N) || s.contains(Category::L) || s.contains(Category::U));
            if !keep {
                g.nodes[c].label = Label::cat(Category::C);
            }
        }
    }
    let root = g.root;
    for c in g.nodes[root].children.clone() {
        let stray = g.nodes[c]
            .label
            .cats()
            .is_some_and(|s| s.contains(Category::P) || s.contains(Category::S));
        if stray {
            g.wrap(c, Label::cat(Category::H));
        }
    }
}

fn primary_children(g: &WorkGraph, n: NodeId) -> usize {
    g.nodes[n].children.len()
}

fn remove_una(g: &mut WorkGraph) {
    for n in g.preorder() {
        if !g.nodes[n].alive || g.nodes[n].label != Label::Una {
            continue;
        }
        let Some(p) = g.nodes[n].parent else { continue };
        if p != g.root && primary_children(g, p) == 1 {
            let toks = std::mem::take(&mut g.nodes[n].tokens);
            g.nodes[p].tokens = toks;
            let remotes = std::mem::take(&mut g.nodes[n].remotes);
            g.nodes[p].remotes.extend(remotes);
            g.kill(n, Some(p));
        } else {
            g.nodes[n].label = Label::cat(Category::C);
        }
    }
    loop {
        let lone = g.preorder().into_iter().find(|&n| {
            g.nodes[n].label.is(Category::H)
                && g.nodes[n]
                    .parent
                    .is_some_and(|p| p != g.root && primary_children(g, p) == 1)
                && !g.is_leaf(n)
        });
        match lone {
            Some(n) => g.splice(n),
            None => break,
        }
    }
    loop {
        let empty = g
            .preorder()
            .into_iter()
            .find(|&n| n != g.root && !g.is_leaf(n) && g.nodes[n].children.is_empty());
        match empty {
            Some(n) => g.kill(n, None),
            None => break,
        }
    }
    for n in g.preorder() {
        let anc: BTreeSet<NodeId> = g.ancestors(n).into_iter().collect();
        let kids: BTreeSet<NodeId> = g.nodes[n].children.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let alive: Vec<bool> = g.nodes.iter().map(|x| x.alive).collect();
        g.nodes[n].remotes.retain(|&(c, t)| {
            alive[t] && t != n && !anc.contains(&t) && !kids.contains(&t) && !c.contains(Category::U) && seen.insert(t)
        });
    }
}

/// Final cleanup; records a snapshot after each sub-step when tracing.
pub fn cleanup(mut g: WorkGraph, _lex: &LexiconSet) -> WorkGraph {
    remove_decorations(&mut g);
    g.snapshot("decorations");
    move_punctuation(&mut g);
    g.snapshot("punctuation");
    resolve_coordination(&mut g);
    g.snapshot("coordination");
    remove_una(&mut g);
    g.snapshot("final");
    g
}
