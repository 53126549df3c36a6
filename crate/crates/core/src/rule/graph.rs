//! Working graph of the rule converter: a forest of provisional units over the
//! (possibly transformed) dependency tree.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::conllulex::{LexExpr, Sentence};
use crate::ucca::{Category, CategorySet, Terminal, UccaPassage};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    Root,
    /// Not yet classified.
    Unset,
    /// Lexical leaf.
    Una,
    /// Wrapper around the lexical leaf of a relational noun (`UNA|A|P`).
    Relational(CategorySet),
    /// Does not evoke a scene.
    Minus,
    /// Evokes a scene, state or process undecided.
    Plus,
    /// Secondary-verb complement awaiting restructuring.
    Caret,
    Cats(CategorySet),
    Coord(Box<Label>),
    /// Scene marker from articulation, e.g. `H(S)` or `H(A|S)|S`.
    HDecor {
        inner: CategorySet,
        suffix: Option<CategorySet>,
    },
}

impl Label {
    pub fn cat(c: Category) -> Label {
        Label::Cats(c.into())
    }

    pub fn is_scene(&self) -> bool {
        match self {
            Label::Plus | Label::HDecor { .. } => true,
            Label::Cats(c) => c.is_scene_head() || c.contains(Category::H),
            Label::Coord(inner) => inner.is_scene(),
            _ => false,
        }
    }

    pub fn cats(&self) -> Option<CategorySet> {
        match self {
            Label::Cats(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is(&self, c: Category) -> bool {
        self.cats() == Some(c.into())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Root => f.write_str("DUMMYROOT"),
            Label::Unset => f.write_str("?"),
            Label::Una => f.write_str("UNA"),
            Label::Relational(c) => write!(f, "UNA|{c}"),
            Label::Minus => f.write_str("-"),
            Label::Plus => f.write_str("+"),
            Label::Caret => f.write_str("^"),
            Label::Cats(c) => write!(f, "{c}"),
            Label::Coord(inner) => write!(f, "{inner}(COORD)"),
            Label::HDecor { inner, suffix } => {
                write!(f, "H({inner})")?;
                if let Some(s) = suffix {
                    write!(f, "|{s}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub label: Label,
    /// Non-empty exactly for leaves.
    pub tokens: Vec<usize>,
    pub children: Vec<NodeId>,
    pub remotes: Vec<(CategorySet, NodeId)>,
    pub parent: Option<NodeId>,
    pub alive: bool,
}

/// A lexical unit: one strong lexical expression (or what remains of it).
#[derive(Debug, Clone)]
pub struct Unit {
    pub node: NodeId,
    pub una: NodeId,
    pub tokens: Vec<usize>,
    pub expr: LexExpr,
    pub punct: bool,
    pub lvc: bool,
    /// Scene status fixed after classification; heads are judged by it.
    pub scene: bool,
    pub attached: bool,
}

#[derive(Debug, Clone)]
pub struct WorkGraph {
    pub sentence: Sentence,
    pub nodes: Vec<Node>,
    pub root: NodeId,
    pub units: Vec<Unit>,
    /// `unit_of[token - 1]` is the unit holding that token.
    pub unit_of: Vec<usize>,
    /// Snapshots of intermediate states inside a step, recorded when tracing.
    pub trace: Option<Vec<(String, String)>>,
    pub notes: Vec<String>,
}

impl WorkGraph {
    pub fn empty(sentence: Sentence) -> Self {
        let root = Node {
            label: Label::Root,
            tokens: Vec::new(),
            children: Vec::new(),
            remotes: Vec::new(),
            parent: None,
            alive: true,
        };
        let n = sentence.tokens.len();
        WorkGraph {
            sentence,
            nodes: vec![root],
            root: 0,
            units: Vec::new(),
            unit_of: vec![usize::MAX; n],
            trace: None,
            notes: Vec::new(),
        }
    }

    pub fn new_node(&mut self, label: Label, tokens: Vec<usize>) -> NodeId {
        self.nodes.push(Node {
            label,
            tokens,
            children: Vec::new(),
            remotes: Vec::new(),
            parent: None,
            alive: true,
        });
        self.nodes.len() - 1
    }

    pub fn detach(&mut self, n: NodeId) {
        if let Some(p) = self.nodes[n].parent.take() {
            self.nodes[p].children.retain(|&c| c != n);
        }
    }

    pub fn move_under(&mut self, n: NodeId, parent: NodeId) {
        self.detach(n);
        self.nodes[parent].children.push(n);
        self.nodes[n].parent = Some(parent);
    }

    /// Puts `new` where `old` sits in its parent; `old` is left detached.
    pub fn replace(&mut self, old: NodeId, new: NodeId) {
        self.detach(new);
        if let Some(p) = self.nodes[old].parent.take() {
            for c in self.nodes[p].children.iter_mut() {
                if *c == old {
                    *c = new;
                }
            }
            self.nodes[new].parent = Some(p);
        }
    }

    /// Inserts a new node labeled `label` between `n` and its parent.
    pub fn wrap(&mut self, n: NodeId, label: Label) -> NodeId {
        let w = self.new_node(label, Vec::new());
        self.replace(n, w);
        self.move_under(n, w);
        w
    }

    /// Removes `n`, handing its children and remote edges to its parent.
    pub fn splice(&mut self, n: NodeId) {
        let Some(p) = self.nodes[n].parent else { return };
        let kids = std::mem::take(&mut self.nodes[n].children);
        let pos = self.nodes[p].children.iter().position(|&c| c == n).unwrap_or(0);
        self.nodes[p].children.remove(pos);
        for (i, k) in kids.iter().enumerate() {
            self.nodes[p].children.insert(pos + i, *k);
            self.nodes[*k].parent = Some(p);
        }
        let remotes = std::mem::take(&mut self.nodes[n].remotes);
        self.nodes[p].remotes.extend(remotes);
        self.kill(n, Some(p));
    }

    /// Marks `n` dead and points remote edges aimed at it to `redirect`.
    pub fn kill(&mut self, n: NodeId, redirect: Option<NodeId>) {
        self.detach(n);
        self.nodes[n].alive = false;
        for node in self.nodes.iter_mut() {
            node.remotes = node
                .remotes
                .drain(..)
                .filter_map(|(c, t)| if t == n { redirect.map(|r| (c, r)) } else { Some((c, t)) })
                .collect();
        }
        for u in self.units.iter_mut() {
            if u.node == n {
                if let Some(r) = redirect {
                    u.node = r;
                }
            }
            if u.una == n {
                if let Some(r) = redirect {
                    u.una = r;
                }
            }
        }
    }

    pub fn add_remote(&mut self, from: NodeId, cat: Category, to: NodeId) {
        self.nodes[from].remotes.push((cat.into(), to));
    }

    pub fn is_leaf(&self, n: NodeId) -> bool {
        !self.nodes[n].tokens.is_empty()
    }

    pub fn ancestors(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.nodes[n].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out
    }

    pub fn yield_of(&self, n: NodeId) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![n];
        while let Some(x) = stack.pop() {
            out.extend(self.nodes[x].tokens.iter().copied());
            stack.extend(self.nodes[x].children.iter().copied());
        }
        out
    }

    /// Live nodes in preorder from the root.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            out.push(x);
            for &c in self.nodes[x].children.iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    pub fn token(&self, id: usize) -> &crate::conllulex::Token {
        &self.sentence.tokens[id - 1]
    }

    pub fn head_of(&self, id: usize) -> usize {
        self.sentence.tokens[id - 1].head
    }

    pub fn depth(&self, id: usize) -> usize {
        let mut d = 0;
        let mut cur = id;
        while cur != 0 && d <= self.sentence.tokens.len() {
            cur = self.head_of(cur);
            d += 1;
        }
        d
    }

    /// Token of a unit whose head lies outside it (the highest one).
    pub fn top_token(&self, u: usize) -> usize {
        let toks = &self.units[u].tokens;
        toks.iter()
            .copied()
            .filter(|&t| !toks.contains(&self.head_of(t)))
            .min_by_key(|&t| (self.depth(t), t))
            .unwrap_or(toks[0])
    }

    /// Unit governing `u`; punctuation units are skipped over.
    pub fn head_unit(&self, u: usize) -> Option<usize> {
        let mut h = self.head_of(self.top_token(u));
        let mut steps = 0;
        while h != 0 && steps <= self.sentence.tokens.len() {
            let v = self.unit_of[h - 1];
            if v != u && !self.units[v].punct {
                return Some(v);
            }
            h = self.head_of(h);
            steps += 1;
        }
        None
    }

    pub fn rel(&self, u: usize) -> &str {
        &self.token(self.top_token(u)).deprel
    }

    pub fn base_rel(&self, u: usize) -> &str {
        self.token(self.top_token(u)).base_deprel()
    }

    /// Units headed by `u`, ordered by top token.
    pub fn dependents(&self, u: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.units.len())
            .filter(|&v| v != u && !self.units[v].punct && self.head_unit(v) == Some(u))
            .collect();
        out.sort_by_key(|&v| self.top_token(v));
        out
    }

    /// Unit indices ordered top-down: by depth of the top token, then token id.
    pub fn units_top_down(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.units.len()).filter(|&u| !self.units[u].punct).collect();
        out.sort_by_key(|&u| {
            let t = self.top_token(u);
            (self.depth(t), t)
        });
        out
    }

    pub fn lemma(&self, u: usize) -> String {
        let t = self.top_token(u);
        self.token(t).lemma.to_lowercase()
    }

    pub fn ss(&self, u: usize) -> Option<&str> {
        self.units[u].expr.ss.as_deref()
    }

    /// Part of speech of a unit: the token UPOS for single words, the lexcat's
    /// syntactic class for multiword expressions.
    pub fn pos(&self, u: usize) -> String {
        let unit = &self.units[u];
        let top = self.token(self.top_token(u));
        if unit.tokens.len() == 1 {
            return top.upos.clone();
        }
        let lc = unit.expr.lexcat.as_str();
        let mapped = if lc.starts_with('V') {
            "VERB"
        } else if lc == "N" {
            "NOUN"
        } else if lc == "P" || lc == "PP" {
            "ADP"
        } else if lc.is_empty() {
            top.upos.as_str()
        } else {
            lc.split('.').next().unwrap_or(lc)
        };
        mapped.to_string()
    }

    /// Attaches unit `u` under the node of unit `h`. Non-scene units are
    /// relabeled; scene units are wrapped in a new node unless `relabel` is forced.
    pub fn attach(&mut self, u: usize, h: usize, cats: CategorySet, force_relabel: bool) -> NodeId {
        let n = self.units[u].node;
        let target = self.units[h].node;
        self.units[u].attached = true;
        if force_relabel || !self.nodes[n].label.is_scene() {
            self.nodes[n].label = Label::Cats(cats);
            self.move_under(n, target);
            n
        } else {
            let w = self.new_node(Label::Cats(cats), Vec::new());
            self.move_under(w, target);
            self.move_under(n, w);
            w
        }
    }

    fn forms(&self, toks: &BTreeSet<usize>) -> String {
        toks.iter()
            .map(|&t| self.token(t).form.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn render_children(&self, n: NodeId, out: &mut Vec<String>) {
        let node = &self.nodes[n];
        let mut items: Vec<(usize, bool, usize, BTreeSet<usize>)> = Vec::new();
        for (i, &c) in node.children.iter().enumerate() {
            let y = self.yield_of(c);
            items.push((y.iter().next().copied().unwrap_or(usize::MAX), false, i, y));
        }
        for (i, &(_, t)) in node.remotes.iter().enumerate() {
            let y = self.yield_of(t);
            items.push((y.iter().next().copied().unwrap_or(usize::MAX), true, i, y));
        }
        items.sort_by_key(|x| (x.0, x.1, x.2));
        let mut prev_max: Option<usize> = None;
        for (min, remote, i, y) in items {
            if remote {
                let (c, _) = node.remotes[i];
                out.push(format!("[{c}* {}]", self.forms(&y)));
                continue;
            }
            if let Some(pm) = prev_max {
                if min > pm + 1 {
                    out.push("…".to_string());
                }
            }
            prev_max = y.iter().next_back().copied();
            out.push(self.render(node.children[i]));
        }
    }

    fn render(&self, n: NodeId) -> String {
        let node = &self.nodes[n];
        if !node.tokens.is_empty() {
            let toks: BTreeSet<usize> = node.tokens.iter().copied().collect();
            return format!("[{} {}]", node.label, self.forms(&toks));
        }
        let mut parts = Vec::new();
        self.render_children(n, &mut parts);
        format!("[{} {}]", node.label, parts.join(" "))
    }

    /// Bracketed rendering of the working state. `with_root` wraps the output in
    /// `[DUMMYROOT ...]`.
    pub fn bracket(&self, with_root: bool) -> String {
        if with_root {
            return self.render(self.root);
        }
        let mut parts = Vec::new();
        self.render_children(self.root, &mut parts);
        parts.join(" ")
    }

    pub fn snapshot(&mut self, name: &str) {
        if self.trace.is_some() {
            let s = self.bracket(false);
            if let Some(t) = self.trace.as_mut() {
                t.push((name.to_string(), s));
            }
        }
    }

    /// Builds the final passage. Working labels that survive are mapped to the
    /// nearest category and noted.
    pub fn to_passage(&mut self, passage_id: &str) -> UccaPassage {
        let terminals = self
            .sentence
            .tokens
            .iter()
            .map(|t| Terminal {
                text: t.form.clone(),
                punct: t.is_punct(),
            })
            .collect();
        let mut p = UccaPassage::new(passage_id, terminals);
        let order = self.preorder();
        let mut ids: HashMap<NodeId, String> = HashMap::new();
        ids.insert(self.root, p.root.clone());
        for (i, &n) in order.iter().enumerate().skip(1) {
            ids.insert(n, format!("1.{}", i + 1));
        }
        let root = self.root;
        if !self.nodes[root].tokens.is_empty() {
            p.units.get_mut("1.1").expect("root").anchors = self.nodes[root].tokens.iter().copied().collect();
        }
        let mut notes = Vec::new();
        for &n in order.iter().skip(1) {
            let node = &self.nodes[n];
            let id = ids[&n].clone();
            p.add_unit(id.clone(), node.tokens.iter().copied().collect());
            let parent = node.parent.map(|x| ids[&x].clone()).unwrap_or_default();
            let cats = final_cats(&node.label, &mut notes);
            p.add_edge(&parent, &id, cats, false);
        }
        for &n in &order {
            for &(c, t) in &self.nodes[n].remotes {
                if let (Some(from), Some(to)) = (ids.get(&n), ids.get(&t)) {
                    p.add_edge(from, to, c, true);
                }
            }
        }
        self.notes.extend(notes);
        p
    }
}

fn final_cats(label: &Label, notes: &mut Vec<String>) -> CategorySet {
    match label {
        Label::Cats(c) if !c.is_empty() => *c,
        other => {
            let c = match other {
                Label::Plus => Category::P,
                Label::HDecor { suffix: Some(_), .. } => Category::C,
                Label::HDecor { .. } | Label::Coord(_) => Category::H,
                Label::Una | Label::Relational(_) => Category::C,
                _ => Category::E,
            };
            notes.push(format!("working label {other} emitted as {c}"));
            c.into()
        }
    }
}
