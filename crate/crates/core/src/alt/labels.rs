//! Builds a UCCA passage from a (transformed) dependency tree: one unit per
//! lexical expression with dependents, edge categories from a majority
//! mapping, then lexical-semantic overrides.

use crate::conllulex::{group_lexical_expressions, Sentence, Token};
use crate::lexicons::LexiconSet;
use crate::rule::classify::mwe_cycles;
use crate::ucca::{Category, CategorySet, Terminal, UccaPassage};

use super::mapping::MajorityMapping;
use super::scene::{classify_scene_evoking, relational_is_state, SceneClass};

const KEPT_APART: [&str; 2] = ["V.LVC.full", "V.VID"];
const SOCIAL_POSSESSIVES: [&str; 2] = ["p.socialrel", "p.orgrole"];

#[derive(Debug, Clone)]
struct Group {
    tokens: Vec<usize>,
    top: usize,
    lexcat: String,
    ss: Option<String>,
    ss2: Option<String>,
    /// Member of a light-verb construction or verbal idiom kept token by token.
    split_from: Option<String>,
}

#[derive(Debug, Default)]
struct DraftNode {
    anchors: Vec<usize>,
    children: Vec<(CategorySet, usize)>,
    remotes: Vec<(CategorySet, usize)>,
}

struct Builder<'a> {
    s: &'a Sentence,
    original: &'a Sentence,
    m: &'a MajorityMapping,
    lex: &'a LexiconSet,
    overrides: bool,
    groups: Vec<Group>,
    group_of: Vec<usize>,
    children: Vec<Vec<usize>>,
    nodes: Vec<DraftNode>,
    warnings: Vec<String>,
}

fn depth(s: &Sentence, id: usize) -> usize {
    let mut d = 0;
    let mut cur = id;
    while cur != 0 && d <= s.tokens.len() {
        cur = s.tokens[cur - 1].head;
        d += 1;
    }
    d
}

fn single(s: &Sentence, t: usize, split_from: Option<String>) -> Group {
    let tok = &s.tokens[t - 1];
    Group {
        tokens: vec![t],
        top: t,
        lexcat: tok.lexcat.clone().unwrap_or_else(|| tok.upos.clone()),
        ss: tok.ss.clone(),
        ss2: tok.ss2.clone(),
        split_from,
    }
}

fn make_groups(s: &Sentence, overrides: bool, warnings: &mut Vec<String>) -> Vec<Group> {
    if !overrides {
        return (1..=s.tokens.len())
            .map(|t| Group {
                tokens: vec![t],
                top: t,
                lexcat: String::new(),
                ss: None,
                ss2: None,
                split_from: None,
            })
            .collect();
    }
    let exprs = match group_lexical_expressions(s) {
        Ok(e) => e,
        Err(e) => {
            warnings.push(format!("{}: {e}; expressions ignored", s.sent_id));
            return (1..=s.tokens.len()).map(|t| single(s, t, None)).collect();
        }
    };
    let mut out = Vec::new();
    for e in exprs.into_iter().filter(|e| e.is_strong()) {
        if e.tokens.len() == 1 {
            out.push(single(s, e.tokens[0], None));
            continue;
        }
        if KEPT_APART.contains(&e.lexcat.as_str()) {
            out.extend(e.tokens.iter().map(|&t| single(s, t, Some(e.lexcat.clone()))));
            continue;
        }
        if mwe_cycles(s, &e.tokens) {
            warnings.push(format!("{}: expression {:?} is cyclic; split", s.sent_id, e.tokens));
            out.extend(e.tokens.iter().map(|&t| single(s, t, None)));
            continue;
        }
        let top = *e
            .tokens
            .iter()
            .min_by_key(|&&t| (depth(s, t), t))
            .expect("non-empty expression");
        out.push(Group {
            tokens: e.tokens,
            top,
            lexcat: e.lexcat,
            ss: e.ss,
            ss2: e.ss2,
            split_from: None,
        });
    }
    out.sort_by_key(|g| g.tokens[0]);
    out
}

fn is_punct(t: &Token) -> bool {
    t.is_punct() || t.base_deprel() == "punct"
}

fn lc(x: &Option<String>) -> String {
    x.as_deref().unwrap_or("").to_lowercase()
}

impl<'a> Builder<'a> {
    fn top(&self, g: usize) -> &Token {
        &self.s.tokens[self.groups[g].top - 1]
    }

    /// The top token carrying its expression's supersense.
    fn semantic_token(&self, g: usize) -> Token {
        let mut t = self.top(g).clone();
        t.ss = self.groups[g].ss.clone();
        t.lemma = t.lemma_lc();
        t
    }

    fn class(&self, g: usize) -> SceneClass {
        if !self.overrides {
            return if self.top(g).upos == "VERB" {
                SceneClass::SceneP
            } else {
                SceneClass::Nonscene
            };
        }
        classify_scene_evoking(&self.semantic_token(g), self.lex)
    }

    fn scene_category(&self, g: usize, class: SceneClass) -> Option<Category> {
        match class {
            SceneClass::SceneP => Some(Category::P),
            SceneClass::SceneS => Some(Category::S),
            SceneClass::Relational if relational_is_state(&self.semantic_token(g), self.lex) => Some(Category::S),
            SceneClass::Relational => Some(Category::P),
            SceneClass::Nonscene => None,
        }
    }

    fn is_verb(&self, g: usize) -> bool {
        self.top(g).upos == "VERB"
    }

    fn special_verb(&self, g: usize) -> Option<Category> {
        if !self.is_verb(g) {
            return None;
        }
        if self.groups[g].split_from.is_some() {
            return Some(Category::F);
        }
        if lc(&self.groups[g].ss) != "v.stative" {
            return None;
        }
        let scene_obj = self.children[g]
            .iter()
            .any(|&c| self.top(c).base_deprel() == "obj" && self.class(c).is_scene());
        if scene_obj {
            Some(Category::F)
        } else if matches!(self.top(g).lemma_lc().as_str(), "be" | "have") {
            Some(Category::S)
        } else {
            Some(Category::P)
        }
    }

    fn predicative_noun(&self, g: usize) -> bool {
        self.overrides
            && self.top(g).head == 0
            && self.top(g).upos == "NOUN"
            && !self.children[g].iter().any(|&c| self.top(c).base_deprel() == "nsubj")
    }

    fn head_category(&self, g: usize) -> Category {
        if !self.overrides {
            if self.top(g).head == 0 {
                return self.m.lookup("root").unwrap_or(Category::C);
            }
            return Category::C;
        }
        if self.predicative_noun(g) {
            return Category::A;
        }
        if let Some(c) = self.special_verb(g) {
            return c;
        }
        self.scene_category(g, self.class(g)).unwrap_or(Category::C)
    }

    /// Category of the edge into dependent `c` of head `h`, and whether the
    /// dependent becomes a possessive scene.
    fn dependent_category(&mut self, c: usize, h: usize) -> (CategorySet, bool) {
        let t = self.top(c).clone();
        if is_punct(&t) {
            return (Category::U.into(), false);
        }
        let head_scene = self.class(h).is_scene();
        let mut cat = match self.m.lookup(&t.deprel) {
            Some(cat) => cat,
            None => {
                let fallback = if head_scene { Category::D } else { Category::E };
                self.warnings.push(format!(
                    "{}: no mapping for `{}`; using {fallback}",
                    self.s.sent_id, t.deprel
                ));
                fallback
            }
        };
        if !self.overrides {
            return (cat.into(), false);
        }
        let group = self.groups[c].clone();
        let ss = lc(&group.ss);
        let ss2 = lc(&group.ss2);

        // Scene-evoking or not.
        let class = self.class(c);
        if cat == Category::C {
            if let Some(sc) = self.scene_category(c, class) {
                cat = sc;
            }
        }
        if head_scene && cat == Category::E {
            cat = Category::D;
        }
        let head_noun = matches!(self.top(h).upos.as_str(), "NOUN" | "PROPN");
        if t.deprel == "amod" && t.upos == "ADJ" && head_noun && !head_scene {
            cat = Category::S;
        }
        if t.deprel == "nmod:poss"
            && (SOCIAL_POSSESSIVES.contains(&ss.as_str()) || SOCIAL_POSSESSIVES.contains(&ss2.as_str()))
        {
            return (Category::E.into(), true);
        }

        // Special cases of verbs.
        if self.children[c].is_empty() && matches!(cat, Category::C | Category::P | Category::S) {
            if let Some(v) = self.special_verb(c) {
                cat = v;
            }
        }
        if group.split_from.is_some() && !self.is_verb(c) && matches!(t.upos.as_str(), "NOUN" | "ADJ") {
            cat = Category::P;
        }

        // Lexical decisions.
        let lemma = t.lemma_lc();
        if ss == "n.time" {
            cat = Category::T;
        }
        if self.lex.is_locative_proadverb(&lemma) {
            cat = Category::A;
        }
        if group.lexcat == "NUM" {
            cat = Category::Q;
        }
        let linker =
            self.lex.is_discourse_word(&lemma) || group.lexcat == "DISC" || ss == "p.purpose" || ss2 == "p.purpose";
        if linker && !matches!(cat, Category::R | Category::D) {
            cat = Category::L;
        }
        if ss == "p.approximator" && cat == Category::D {
            cat = Category::E;
        }

        // Structural decisions.
        let orig = &self.original.tokens[t.id - 1];
        if t.base_deprel() == "conj" {
            let first = orig.head;
            let first_group = if first == 0 { h } else { self.group_of[first - 1] };
            if !self.class(first_group).is_scene() {
                cat = Category::C;
            }
        }
        let head_scene_noun = head_noun && head_scene;
        if head_scene_noun && (t.base_deprel() == "compound" || t.deprel == "nmod:poss") {
            cat = Category::A;
        }
        if t.base_deprel() == "vocative" {
            return (CategorySet::from_slice(&[Category::A, Category::G]), false);
        }
        (cat.into(), false)
    }

    fn new_node(&mut self, anchors: Vec<usize>) -> usize {
        self.nodes.push(DraftNode {
            anchors,
            ..DraftNode::default()
        });
        self.nodes.len() - 1
    }

    /// Builds group `g`; `force_unit` wraps even a childless group.
    fn build(&mut self, g: usize, force_unit: bool) -> usize {
        let anchors = self.groups[g].tokens.clone();
        if self.children[g].is_empty() && !force_unit {
            return self.new_node(anchors);
        }
        let unit = self.new_node(Vec::new());
        let head = self.new_node(anchors);
        let hc = self.head_category(g);
        self.nodes[unit].children.push((hc.into(), head));
        for c in self.children[g].clone() {
            let (cat, possessive_scene) = self.dependent_category(c, g);
            let built = self.build(c, false);
            if possessive_scene {
                let scene = self.new_node(Vec::new());
                self.nodes[scene]
                    .children
                    .push((CategorySet::from_slice(&[Category::A, Category::S]), built));
                self.nodes[scene].remotes.push((Category::A.into(), head));
                self.nodes[unit].children.push((cat, scene));
            } else {
                self.nodes[unit].children.push((cat, built));
            }
        }
        unit
    }

    fn emit(&self, root: usize) -> UccaPassage {
        let terminals = self
            .s
            .tokens
            .iter()
            .map(|t| Terminal {
                text: t.form.clone(),
                punct: t.is_punct(),
            })
            .collect();
        let mut p = UccaPassage::new(self.s.sent_id.clone(), terminals);
        let mut ids = vec![String::new(); self.nodes.len()];
        ids[root] = p.root.clone();
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            order.push(n);
            for &(_, c) in self.nodes[n].children.iter().rev() {
                stack.push(c);
            }
        }
        for (i, &n) in order.iter().enumerate().skip(1) {
            ids[n] = format!("1.{}", i + 1);
            p.add_unit(ids[n].clone(), self.nodes[n].anchors.iter().copied().collect());
        }
        for &n in &order {
            for &(cat, c) in &self.nodes[n].children {
                p.add_edge(&ids[n], &ids[c], cat, false);
            }
        }
        for &n in &order {
            for &(cat, c) in &self.nodes[n].remotes {
                p.add_edge(&ids[n], &ids[c], cat, true);
            }
        }
        p
    }
}

/// Maps a transformed sentence to a passage. `original` is the sentence
/// before promotion and decides the coordination override.
pub(crate) fn map_labels_full(
    s: &Sentence,
    original: &Sentence,
    m: &MajorityMapping,
    lex: &LexiconSet,
    overrides: bool,
) -> (UccaPassage, Vec<String>) {
    let mut warnings = Vec::new();
    let groups = make_groups(s, overrides, &mut warnings);
    let mut group_of = vec![0; s.tokens.len()];
    for (i, g) in groups.iter().enumerate() {
        for &t in &g.tokens {
            group_of[t - 1] = i;
        }
    }
    let mut children = vec![Vec::new(); groups.len()];
    let mut roots = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        match s.tokens[g.top - 1].head {
            0 => roots.push(i),
            h => children[group_of[h - 1]].push(i),
        }
    }
    let mut b = Builder {
        s,
        original,
        m,
        lex,
        overrides,
        groups,
        group_of,
        children,
        nodes: Vec::new(),
        warnings,
    };
    let root = b.new_node(Vec::new());
    for r in roots {
        let top = b.top(r).clone();
        let built = b.build(r, !is_punct(&top));
        let cat = if is_punct(&top) { Category::U } else { Category::H };
        b.nodes[root].children.push((cat.into(), built));
    }
    let p = b.emit(root);
    (p, b.warnings)
}

/// Maps an already-transformed sentence. With `overrides` off only the
/// majority mapping is used and lexical annotation is ignored.
pub fn map_labels(s: &Sentence, m: &MajorityMapping, lex: &LexiconSet, overrides: bool) -> UccaPassage {
    let (p, warnings) = map_labels_full(s, s, m, lex, overrides);
    for w in warnings {
        log::debug!("{w}");
    }
    p
}
