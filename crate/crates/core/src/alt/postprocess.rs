//! Category repairs that enforce sibling and parent restrictions.

use std::collections::{BTreeSet, HashMap};

use crate::ucca::{Category, CategorySet, UccaPassage};

pub const MAX_ROUNDS: usize = 10;

const TOP_LEVEL: [Category; 5] = [Category::L, Category::H, Category::F, Category::G, Category::U];

/// Primary child edge indices per parent, in edge order.
fn child_edges(p: &UccaPassage) -> HashMap<String, Vec<usize>> {
    let mut out: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, e) in p.edges.iter().enumerate().filter(|(_, e)| !e.remote) {
        out.entry(e.parent.clone()).or_default().push(i);
    }
    out
}

fn has(p: &UccaPassage, edges: &[usize], c: Category) -> bool {
    edges.iter().any(|&i| p.edges[i].categories.contains(c))
}

fn replace(set: &mut CategorySet, from: Category, to: Category) -> bool {
    if set.contains(from) {
        set.remove(from);
        set.insert(to);
        true
    } else {
        false
    }
}

fn is_scene(p: &UccaPassage, edges: &[usize]) -> bool {
    has(p, edges, Category::P) || has(p, edges, Category::S)
}

/// Applies one rewrite to every unit; returns whether anything changed.
fn per_unit(p: &mut UccaPassage, f: impl Fn(&UccaPassage, &str, &[usize]) -> Vec<(usize, Category, Category)>) -> bool {
    let mut units: Vec<(String, Vec<usize>)> = child_edges(p).into_iter().collect();
    units.sort();
    let mut changed = false;
    for (u, edges) in units {
        for (i, from, to) in f(p, &u, &edges) {
            changed |= replace(&mut p.edges[i].categories, from, to);
        }
    }
    changed
}

fn table_rows(p: &mut UccaPassage, yields: &HashMap<String, BTreeSet<usize>>) -> bool {
    let mut changed = false;
    // C of unit with A becomes P.
    changed |= per_unit(p, |p, _, es| {
        if !has(p, es, Category::A) {
            return vec![];
        }
        es.iter().map(|&i| (i, Category::C, Category::P)).collect()
    });
    // P, S or D beside C: C when N is present, E otherwise.
    changed |= per_unit(p, |p, _, es| {
        let to = if has(p, es, Category::N) {
            Category::C
        } else {
            Category::E
        };
        let mut out = vec![];
        for &i in es {
            let cats = p.edges[i].categories;
            let c_elsewhere = es
                .iter()
                .any(|&j| j != i && p.edges[j].categories.contains(Category::C));
            if c_elsewhere && !cats.contains(Category::C) {
                for from in [Category::P, Category::S, Category::D] {
                    out.push((i, from, to));
                }
            }
        }
        out
    });
    // N beside H becomes L.
    changed |= per_unit(p, |p, _, es| {
        if !has(p, es, Category::H) {
            return vec![];
        }
        es.iter().map(|&i| (i, Category::N, Category::L)).collect()
    });
    // L without H: R when it starts a scene, N otherwise.
    changed |= per_unit(p, |p, u, es| {
        if has(p, es, Category::H) || u == p.root {
            return vec![];
        }
        let first = es
            .iter()
            .min_by_key(|&&i| {
                yields
                    .get(&p.edges[i].child)
                    .and_then(|y| y.first().copied())
                    .unwrap_or(usize::MAX)
            })
            .copied();
        let scene = is_scene(p, es);
        es.iter()
            .map(|&i| {
                let to = if scene && Some(i) == first {
                    Category::R
                } else {
                    Category::N
                };
                (i, Category::L, to)
            })
            .collect()
    });
    // Top-level edges outside {L, H, F, G, U} become H.
    let root = p.root.clone();
    for e in p.edges.iter_mut().filter(|e| !e.remote && e.parent == root) {
        if e.categories.iter().any(|c| !TOP_LEVEL.contains(&c)) {
            e.categories = Category::H.into();
            changed = true;
        }
    }
    changed
}

/// Moves H and L children of non-root scene units up to the scene's parent.
fn promote_from_scenes(p: &mut UccaPassage) -> bool {
    let children = child_edges(p);
    let parent: HashMap<String, String> = p
        .edges
        .iter()
        .filter(|e| !e.remote)
        .map(|e| (e.child.clone(), e.parent.clone()))
        .collect();
    let mut scenes: Vec<&String> = children.keys().filter(|u| **u != p.root).collect();
    scenes.sort();
    let mut moves = Vec::new();
    for u in scenes {
        let es = &children[u];
        if !is_scene(p, es) {
            continue;
        }
        let Some(up) = parent.get(u) else { continue };
        for &i in es {
            let cats = p.edges[i].categories;
            let keeps_scene = cats.contains(Category::P) || cats.contains(Category::S);
            if !keeps_scene && (cats.contains(Category::H) || cats.contains(Category::L)) {
                moves.push((i, up.clone()));
            }
        }
    }
    let changed = !moves.is_empty();
    for (i, up) in moves {
        p.edges[i].parent = up;
    }
    changed
}

fn drop_linkage_remotes(p: &mut UccaPassage) -> bool {
    let before = p.edges.len();
    p.edges.retain(|e| {
        !(e.remote
            && (e.categories.contains(Category::H)
                || e.categories.contains(Category::N)
                || e.categories.contains(Category::L)))
    });
    p.edges.len() != before
}

fn round(p: &mut UccaPassage) -> bool {
    let yields = p.yields();
    let mut changed = table_rows(p, &yields);
    changed |= promote_from_scenes(p);
    changed |= drop_linkage_remotes(p);
    changed
}

/// Runs repair rounds to a fixpoint; the second value is false when the
/// round cap was reached first.
pub fn postprocess_checked(p: &UccaPassage) -> (UccaPassage, bool) {
    let mut out = p.clone();
    for _ in 0..MAX_ROUNDS {
        if !round(&mut out) {
            return (out, true);
        }
    }
    let settled = !round(&mut out.clone());
    (out, settled)
}

pub fn postprocess(p: &UccaPassage) -> UccaPassage {
    let (out, settled) = postprocess_checked(p);
    if !settled {
        log::warn!("{}: postprocessing did not settle in {MAX_ROUNDS} rounds", p.passage_id);
    }
    out
}
