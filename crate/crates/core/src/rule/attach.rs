//! Attachment of dependents to their heads' units, and coordination.

use crate::lexicons::LexiconSet;
use crate::ucca::{Category, CategorySet};

use super::graph::{Label, WorkGraph};

const MODALS: [&str; 8] = ["can", "could", "may", "might", "must", "should", "shall", "ought"];
const DEMONSTRATIVES: [&str; 4] = ["this", "that", "these", "those"];
const QUANTIFIERS: [&str; 16] = [
    "some", "any", "all", "every", "each", "many", "few", "several", "both", "much", "more", "most", "enough",
    "little", "less", "fewer",
];
const NEGATORS: [&str; 3] = ["no", "neither", "nor"];
const TEMPORAL_ADVERBS: [&str; 34] = [
    "never",
    "always",
    "often",
    "sometimes",
    "usually",
    "ever",
    "already",
    "still",
    "yet",
    "soon",
    "now",
    "then",
    "again",
    "today",
    "tomorrow",
    "yesterday",
    "recently",
    "once",
    "later",
    "early",
    "late",
    "before",
    "ago",
    "frequently",
    "rarely",
    "seldom",
    "occasionally",
    "forever",
    "currently",
    "finally",
    "eventually",
    "immediately",
    "lately",
    "tonight",
];
const RELATIVE_PRONOUNS: [&str; 6] = ["who", "whom", "whose", "which", "that", "where"];

fn cat(c: Category) -> CategorySet {
    c.into()
}

/// Units still unattached whose relation satisfies `pred`, ordered top-down.
fn pending(g: &WorkGraph, pred: impl Fn(&WorkGraph, usize) -> bool) -> Vec<(usize, usize)> {
    g.units_top_down()
        .into_iter()
        .filter(|&u| !g.units[u].attached)
        .filter_map(|u| g.head_unit(u).map(|h| (u, h)))
        .filter(|&(u, _)| pred(g, u))
        .collect()
}

fn head_is_advcl(g: &WorkGraph, h: usize) -> bool {
    g.base_rel(h) == "advcl"
}

/// Determiners, auxiliaries, copulas, expletives, vocatives and interjections.
pub fn attach_function_words(mut g: WorkGraph, _lex: &LexiconSet) -> WorkGraph {
    let rels = ["det", "aux", "cop", "expl", "vocative", "discourse", "mark"];
    for (u, h) in pending(&g, |g, u| rels.contains(&g.base_rel(u))) {
        let lemma = g.lemma(u);
        let head_scene = g.units[h].scene;
        let c = match g.base_rel(u) {
            "det" => {
                let dem =
                    DEMONSTRATIVES.contains(&lemma.as_str()) || g.token(g.top_token(u)).feat("PronType") == Some("Dem");
                if NEGATORS.contains(&lemma.as_str()) {
                    Category::D
                } else if QUANTIFIERS.contains(&lemma.as_str()) {
                    if head_scene {
                        Category::D
                    } else {
                        Category::Q
                    }
                } else if dem && !head_scene {
                    Category::E
                } else {
                    Category::F
                }
            }
            "aux" if MODALS.contains(&lemma.as_str()) => Category::D,
            "vocative" | "discourse" => Category::G,
            "mark" => {
                if lemma == "to" || lemma == "that" {
                    Category::F
                } else {
                    continue;
                }
            }
            _ => Category::F,
        };
        g.attach(u, h, cat(c), false);
    }
    g
}

/// Adverbial and adnominal modifiers, adpositions, possessives and relative clauses.
pub fn attach_modifiers(mut g: WorkGraph, lex: &LexiconSet) -> WorkGraph {
    let rels = [
        "advmod", "amod", "nummod", "compound", "nmod", "case", "acl", "appos", "flat", "fixed", "mark",
    ];
    for (u, h) in pending(&g, |g, u| {
        let r = g.base_rel(u);
        rels.contains(&r) || g.rel(u) == "obl:tmod"
    }) {
        let rel = g.rel(u).to_string();
        let base = g.base_rel(u).to_string();
        let lemma = g.lemma(u);
        let head_scene = g.units[h].scene;
        let ss = g.ss(u).unwrap_or("").to_lowercase();
        match base.as_str() {
            "advmod" => {
                let c = if TEMPORAL_ADVERBS.contains(&lemma.as_str())
                    || matches!(ss.as_str(), "p.time" | "p.frequency" | "p.duration")
                {
                    Category::T
                } else if head_scene {
                    Category::D
                } else {
                    Category::E
                };
                g.attach(u, h, cat(c), false);
            }
            "amod" => {
                if head_scene {
                    g.attach(u, h, cat(Category::D), true);
                } else if g.units[u].scene {
                    g.attach(u, h, cat(Category::E), false);
                } else {
                    let c = if lex.is_quantity_adj(&lemma) {
                        Category::Q
                    } else {
                        Category::E
                    };
                    g.attach(u, h, cat(c), false);
                }
            }
            "nummod" => {
                g.attach(u, h, cat(Category::Q), false);
            }
            "compound" if rel == "compound:prt" => {
                g.attach(u, h, cat(Category::F), false);
            }
            "case" => {
                g.attach(u, h, cat(Category::R), false);
            }
            "mark" => {
                if !head_is_advcl(&g, h) {
                    g.attach(u, h, cat(Category::R), false);
                }
            }
            "nmod" if rel == "nmod:poss" => attach_possessive(&mut g, u, h),
            "acl" if rel == "acl:relcl" => {
                g.attach(u, h, cat(Category::E), false);
                let (inner, target) = (g.units[u].node, g.units[h].una);
                g.add_remote(inner, Category::A, target);
            }
            "acl" => {
                let c = if head_scene { Category::A } else { Category::E };
                g.attach(u, h, cat(c), false);
            }
            "obl" => {
                g.attach(u, h, cat(Category::T), false);
            }
            _ => {
                let c = if head_scene && (base == "nmod" || base == "compound") {
                    Category::A
                } else {
                    Category::E
                };
                g.attach(u, h, cat(c), false);
            }
        }
    }
    g
}

/// Function supersenses of the Gestalt family mark canonical possession.
const GESTALT_FAMILY: [&str; 3] = ["p.gestalt", "p.possessor", "p.whole"];

fn is_canonical_possessor(g: &WorkGraph, u: usize) -> bool {
    let e = &g.units[u].expr;
    let function = e.ss2.as_deref().or(e.ss.as_deref()).unwrap_or("").to_lowercase();
    GESTALT_FAMILY.contains(&function.as_str())
}

fn attach_possessive(g: &mut WorkGraph, u: usize, h: usize) {
    let clitic = g
        .dependents(u)
        .into_iter()
        .find(|&v| g.base_rel(v) == "case" && !g.units[v].attached && g.pos(v) == "PART");
    let canonical = is_canonical_possessor(g, u) || clitic.is_some_and(|c| is_canonical_possessor(g, c));
    let target = g.units[h].una;
    log::debug!(
        "{}: possessive at {:?} canonical={canonical}",
        g.sentence.sent_id,
        g.units[u].tokens
    );
    match (canonical, clitic) {
        (true, Some(c)) => {
            let cn = g.units[c].node;
            let un = g.units[u].node;
            g.units[c].attached = true;
            g.units[u].attached = true;
            g.nodes[cn].label = Label::cat(Category::S);
            g.nodes[un].label = Label::cat(Category::A);
            let hn = g.units[h].node;
            g.move_under(cn, hn);
            g.move_under(un, cn);
            g.wrap(cn, Label::cat(Category::E));
            g.add_remote(cn, Category::A, target);
        }
        (true, None) => {
            let hn = g.units[h].node;
            let e = g.new_node(Label::cat(Category::E), Vec::new());
            g.move_under(e, hn);
            let un = g.units[u].node;
            g.units[u].attached = true;
            g.nodes[un].label = Label::Cats(CategorySet::from_slice(&[Category::A, Category::S]));
            g.move_under(un, e);
            g.add_remote(e, Category::A, target);
        }
        (false, _) => {
            g.attach(u, h, cat(Category::A), false);
        }
    }
}

fn is_relative_pronoun(g: &WorkGraph, u: usize, h: usize) -> bool {
    let t = g.token(g.top_token(u));
    (t.feat("PronType") == Some("Rel") || RELATIVE_PRONOUNS.contains(&g.lemma(u).as_str())) && g.rel(h) == "acl:relcl"
}

const DEFERRED: [&str; 7] = ["conj", "cc", "punct", "advcl", "parataxis", "root", "mark"];

/// Core arguments and the remaining dependents (catch-all).
pub fn attach_arguments(mut g: WorkGraph, _lex: &LexiconSet) -> WorkGraph {
    for (u, h) in pending(&g, |g, u| !DEFERRED.contains(&g.base_rel(u))) {
        let head_scene = g.units[h].scene;
        let base = g.base_rel(u).to_string();
        if is_relative_pronoun(&g, u, h) && matches!(base.as_str(), "nsubj" | "obj" | "obl" | "nmod") {
            g.attach(u, h, cat(Category::R), false);
            continue;
        }
        if base == "xcomp" && head_scene && g.pos(u) == "VERB" {
            let hn = g.units[h].node;
            let n = g.units[u].node;
            g.units[u].attached = true;
            let w = g.new_node(Label::Caret, Vec::new());
            g.move_under(w, hn);
            g.move_under(n, w);
            continue;
        }
        let c = match base.as_str() {
            "nsubj" | "csubj" | "obj" | "iobj" | "obl" | "ccomp" | "xcomp" | "pred" => Category::A,
            _ if head_scene => Category::A,
            _ => Category::E,
        };
        g.attach(u, h, cat(c), false);
    }
    g
}

/// Coordination (and clause linkage) in top-down order, then leftovers.
pub fn build_coordination(mut g: WorkGraph, _lex: &LexiconSet) -> WorkGraph {
    let heads: Vec<usize> = g
        .units_top_down()
        .into_iter()
        .filter(|&x| {
            g.dependents(x)
                .iter()
                .any(|&y| !g.units[y].attached && matches!(g.base_rel(y), "conj" | "advcl" | "parataxis"))
        })
        .collect();
    for x in heads {
        let deps: Vec<usize> = g.dependents(x).into_iter().filter(|&y| !g.units[y].attached).collect();
        let conjuncts: Vec<usize> = deps.iter().copied().filter(|&y| g.base_rel(y) == "conj").collect();
        if !conjuncts.is_empty() {
            coordinate(&mut g, x, &conjuncts);
            g.snapshot("coordination");
        }
        for y in deps {
            if matches!(g.base_rel(y), "advcl" | "parataxis") && !g.units[y].attached {
                link_clause(&mut g, x, y);
            }
        }
    }
    for (u, h) in pending(&g, |g, u| g.base_rel(u) != "punct") {
        let head_scene = g.units[h].scene;
        let c = match g.base_rel(u) {
            "cc" => {
                if head_scene {
                    Category::L
                } else {
                    Category::N
                }
            }
            "mark" => Category::R,
            _ if head_scene => Category::A,
            _ => Category::E,
        };
        g.attach(u, h, cat(c), false);
    }
    g
}

fn coordinate(g: &mut WorkGraph, x: usize, conjuncts: &[usize]) {
    let xn = g.units[x].node;
    let xlabel = g.nodes[xn].label.clone();
    let scene = xlabel.is_scene();
    let coord_label = Label::Coord(Box::new(xlabel.clone()));
    let coord = g.new_node(coord_label, Vec::new());
    g.replace(xn, coord);
    if !scene && matches!(xlabel, Label::Cats(_)) {
        g.nodes[xn].label = Label::Minus;
    }
    g.move_under(xn, coord);
    let connector = if scene { Category::L } else { Category::N };
    let mut ccs: Vec<usize> = g
        .dependents(x)
        .into_iter()
        .filter(|&v| g.base_rel(v) == "cc" && !g.units[v].attached)
        .collect();
    for &y in conjuncts {
        g.units[y].attached = true;
        let yn = g.units[y].node;
        g.move_under(yn, coord);
        ccs.extend(
            g.dependents(y)
                .into_iter()
                .filter(|&v| g.base_rel(v) == "cc" && !g.units[v].attached),
        );
    }
    for c in ccs {
        g.units[c].attached = true;
        let cn = g.units[c].node;
        if g.nodes[cn].label.is_scene() {
            let w = g.new_node(Label::cat(connector), Vec::new());
            g.move_under(w, coord);
            g.move_under(cn, w);
        } else {
            g.nodes[cn].label = Label::cat(connector);
            g.move_under(cn, coord);
        }
    }
}

fn link_clause(g: &mut WorkGraph, x: usize, y: usize) {
    let marks: Vec<usize> = g
        .dependents(y)
        .into_iter()
        .filter(|&v| g.base_rel(v) == "mark" && !g.units[v].attached)
        .collect();
    let xn = g.units[x].node;
    if g.units[x].scene && g.units[y].scene && g.nodes[xn].label.is_scene() {
        let coord = g.new_node(Label::Coord(Box::new(g.nodes[xn].label.clone())), Vec::new());
        g.replace(xn, coord);
        g.move_under(xn, coord);
        g.units[y].attached = true;
        let yn = g.units[y].node;
        g.move_under(yn, coord);
        for m in marks {
            g.units[m].attached = true;
            let mn = g.units[m].node;
            g.nodes[mn].label = Label::cat(Category::L);
            g.move_under(mn, coord);
        }
    } else {
        let c = if g.units[x].scene { Category::D } else { Category::E };
        g.attach(y, x, cat(c), false);
        for m in marks {
            g.attach(m, y, cat(Category::R), false);
        }
    }
}
