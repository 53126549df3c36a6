//! UCCA passages: token-anchored DAGs with primary and remote edges.

mod bracket;
mod json;
mod xml;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bracket::{bracket_string, normalize_bracket};
pub use json::{parse_json, serialize_json};
pub use xml::{parse_xml, parse_xml_all, parse_xml_strict, serialize_xml, serialize_xml_many, XmlParse};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UccaError {
    #[error("unknown category code `{0}`")]
    UnknownCategory(String),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("malformed passage: {0}")]
    Malformed(String),
    #[error("passage `{id}` failed validation: {violations:?}")]
    Invalid { id: String, violations: Vec<String> },
}

/// UCCA foundational-layer category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    A,
    C,
    D,
    E,
    F,
    G,
    H,
    L,
    N,
    P,
    Q,
    R,
    S,
    T,
    U,
}

impl Category {
    pub const ALL: [Category; 15] = [
        Category::A,
        Category::C,
        Category::D,
        Category::E,
        Category::F,
        Category::G,
        Category::H,
        Category::L,
        Category::N,
        Category::P,
        Category::Q,
        Category::R,
        Category::S,
        Category::T,
        Category::U,
    ];

    pub fn code(self) -> char {
        match self {
            Category::A => 'A',
            Category::C => 'C',
            Category::D => 'D',
            Category::E => 'E',
            Category::F => 'F',
            Category::G => 'G',
            Category::H => 'H',
            Category::L => 'L',
            Category::N => 'N',
            Category::P => 'P',
            Category::Q => 'Q',
            Category::R => 'R',
            Category::S => 'S',
            Category::T => 'T',
            Category::U => 'U',
        }
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }

    /// Main relations of a scene.
    pub fn is_scene_head(self) -> bool {
        matches!(self, Category::P | Category::S)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl FromStr for Category {
    type Err = UccaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let c = match s.trim() {
            "A" | "Participant" => Category::A,
            "C" | "Center" => Category::C,
            "D" | "Adverbial" => Category::D,
            "E" | "Elaborator" => Category::E,
            "F" | "Function" => Category::F,
            "G" | "Ground" => Category::G,
            "H" | "ParallelScene" => Category::H,
            "L" | "Linker" => Category::L,
            "N" | "Connector" => Category::N,
            "P" | "Process" => Category::P,
            "Q" | "Quantifier" => Category::Q,
            "R" | "Relator" => Category::R,
            "S" | "State" => Category::S,
            "T" | "Time" => Category::T,
            "U" | "Punctuation" => Category::U,
            other => return Err(UccaError::UnknownCategory(other.to_string())),
        };
        Ok(c)
    }
}

/// A set of categories on one edge, rendered in alphabetical order (`A|S`, `D|T`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CategorySet(u16);

impl CategorySet {
    pub const EMPTY: CategorySet = CategorySet(0);

    pub fn single(c: Category) -> Self {
        CategorySet(c.bit())
    }

    pub fn from_slice(cs: &[Category]) -> Self {
        let mut s = CategorySet::EMPTY;
        for &c in cs {
            s.insert(c);
        }
        s
    }

    pub fn insert(&mut self, c: Category) {
        self.0 |= c.bit();
    }

    pub fn remove(&mut self, c: Category) {
        self.0 &= !c.bit();
    }

    pub fn contains(self, c: Category) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Category> {
        Category::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    pub fn first(self) -> Option<Category> {
        self.iter().next()
    }

    pub fn union(self, other: CategorySet) -> CategorySet {
        CategorySet(self.0 | other.0)
    }

    pub fn intersects(self, other: CategorySet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_scene_head(self) -> bool {
        self.contains(Category::P) || self.contains(Category::S)
    }
}

impl From<Category> for CategorySet {
    fn from(c: Category) -> Self {
        CategorySet::single(c)
    }
}

impl fmt::Display for CategorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in self.iter() {
            if !first {
                f.write_str("|")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CategorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for CategorySet {
    type Err = UccaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = CategorySet::EMPTY;
        for part in s.split('|') {
            set.insert(part.parse()?);
        }
        Ok(set)
    }
}

impl Serialize for CategorySet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CategorySet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminal {
    pub text: String,
    #[serde(default)]
    pub punct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UccaUnit {
    pub id: String,
    #[serde(default)]
    pub anchors: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UccaEdge {
    pub parent: String,
    pub child: String,
    pub categories: CategorySet,
    #[serde(default)]
    pub remote: bool,
}

/// One sentence-level UCCA graph. Token ids are 1-based; `terminals[i]` is token `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UccaPassage {
    pub passage_id: String,
    pub terminals: Vec<Terminal>,
    pub units: BTreeMap<String, UccaUnit>,
    pub edges: Vec<UccaEdge>,
    pub root: String,
}

/// Structural violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: &'static str,
    pub subject: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.subject)
    }
}

impl UccaPassage {
    pub fn new(passage_id: impl Into<String>, terminals: Vec<Terminal>) -> Self {
        let root = "1.1".to_string();
        let mut units = BTreeMap::new();
        units.insert(
            root.clone(),
            UccaUnit {
                id: root.clone(),
                anchors: BTreeSet::new(),
            },
        );
        UccaPassage {
            passage_id: passage_id.into(),
            terminals,
            units,
            edges: Vec::new(),
            root,
        }
    }

    pub fn add_unit(&mut self, id: impl Into<String>, anchors: BTreeSet<usize>) -> String {
        let id = id.into();
        self.units.insert(
            id.clone(),
            UccaUnit {
                id: id.clone(),
                anchors,
            },
        );
        id
    }

    pub fn add_edge(&mut self, parent: &str, child: &str, categories: CategorySet, remote: bool) {
        self.edges.push(UccaEdge {
            parent: parent.to_string(),
            child: child.to_string(),
            categories,
            remote,
        });
    }

    pub fn primary_children<'a>(&'a self, u: &'a str) -> impl Iterator<Item = &'a UccaEdge> + 'a {
        self.edges.iter().filter(move |e| !e.remote && e.parent == u)
    }

    pub fn outgoing<'a>(&'a self, u: &'a str) -> impl Iterator<Item = &'a UccaEdge> + 'a {
        self.edges.iter().filter(move |e| e.parent == u)
    }

    pub fn primary_parent(&self, u: &str) -> Option<&UccaEdge> {
        self.edges.iter().find(|e| !e.remote && e.child == u)
    }

    pub fn is_leaf(&self, u: &str) -> bool {
        self.units.get(u).is_some_and(|x| !x.anchors.is_empty())
    }

    pub fn token_count(&self) -> usize {
        self.terminals.len()
    }

    /// Yields of every unit, computed once over primary edges.
    pub fn yields(&self) -> HashMap<String, BTreeSet<usize>> {
        let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
        for e in self.edges.iter().filter(|e| !e.remote) {
            children.entry(e.parent.as_str()).or_default().push(e.child.as_str());
        }
        let mut out: HashMap<String, BTreeSet<usize>> = HashMap::new();
        fn go<'a>(
            p: &'a UccaPassage,
            u: &'a str,
            children: &HashMap<&'a str, Vec<&'a str>>,
            out: &mut HashMap<String, BTreeSet<usize>>,
            stack: &mut Vec<&'a str>,
        ) -> BTreeSet<usize> {
            if let Some(y) = out.get(u) {
                return y.clone();
            }
            if stack.contains(&u) {
                return BTreeSet::new();
            }
            stack.push(u);
            let mut y = p.units.get(u).map(|x| x.anchors.clone()).unwrap_or_default();
            if let Some(cs) = children.get(u) {
                for c in cs {
                    y.extend(go(p, c, children, out, stack));
                }
            }
            stack.pop();
            out.insert(u.to_string(), y.clone());
            y
        }
        let mut stack = Vec::new();
        for id in self.units.keys() {
            go(self, id, &children, &mut out, &mut stack);
        }
        out
    }

    /// Renumbers units in preorder (root `1.1`) and sorts edges, so equal graphs serialize identically.
    pub fn canonicalize(&self) -> UccaPassage {
        let yields = self.yields();
        let key = |u: &str| -> (usize, usize) {
            let y = yields.get(u);
            (
                y.and_then(|y| y.iter().next().copied()).unwrap_or(usize::MAX),
                y.and_then(|y| y.iter().next_back().copied()).unwrap_or(usize::MAX),
            )
        };
        let mut order: Vec<String> = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut stack = vec![self.root.clone()];
        while let Some(u) = stack.pop() {
            if !seen.insert(u.clone()) {
                continue;
            }
            order.push(u.clone());
            let mut kids: Vec<&UccaEdge> = self.primary_children(&u).collect();
            kids.sort_by(|a, b| {
                key(&a.child)
                    .cmp(&key(&b.child))
                    .then(a.categories.cmp(&b.categories))
                    .then(a.child.cmp(&b.child))
            });
            for k in kids.iter().rev() {
                stack.push(k.child.clone());
            }
        }
        // Units unreachable through primary edges keep a stable trailing order.
        for id in self.units.keys() {
            if !seen.contains(id) {
                order.push(id.clone());
            }
        }
        let rename: HashMap<&str, String> = order
            .iter()
            .enumerate()
            .map(|(i, old)| (old.as_str(), format!("1.{}", i + 1)))
            .collect();
        let rank: HashMap<&str, usize> = order.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();
        let mut units = BTreeMap::new();
        for (old, u) in &self.units {
            let id = rename[old.as_str()].clone();
            units.insert(
                id.clone(),
                UccaUnit {
                    id,
                    anchors: u.anchors.clone(),
                },
            );
        }
        let mut edges: Vec<(usize, bool, usize, UccaEdge)> = self
            .edges
            .iter()
            .map(|e| {
                let pr = rank.get(e.parent.as_str()).copied().unwrap_or(usize::MAX);
                let cr = rank.get(e.child.as_str()).copied().unwrap_or(usize::MAX);
                let map = |s: &str| rename.get(s).cloned().unwrap_or_else(|| s.to_string());
                (
                    pr,
                    e.remote,
                    cr,
                    UccaEdge {
                        parent: map(&e.parent),
                        child: map(&e.child),
                        categories: e.categories,
                        remote: e.remote,
                    },
                )
            })
            .collect();
        edges.sort_by_key(|e| (e.0, e.1, e.2, e.3.categories));
        UccaPassage {
            passage_id: self.passage_id.clone(),
            terminals: self.terminals.clone(),
            units,
            edges: edges.into_iter().map(|x| x.3).collect(),
            root: rename
                .get(self.root.as_str())
                .cloned()
                .unwrap_or_else(|| self.root.clone()),
        }
    }
}

/// Tokens reachable from `u` through primary edges.
pub fn terminal_yield(p: &UccaPassage, u: &str) -> Result<BTreeSet<usize>, UccaError> {
    if !p.units.contains_key(u) {
        return Err(UccaError::UnknownUnit(u.to_string()));
    }
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        if let Some(unit) = p.units.get(x) {
            out.extend(unit.anchors.iter().copied());
        }
        for e in p.primary_children(x) {
            stack.push(&e.child);
        }
    }
    Ok(out)
}

fn has_cycle(nodes: &BTreeMap<String, UccaUnit>, edges: &[&UccaEdge]) -> Option<String> {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in edges {
        adj.entry(e.parent.as_str()).or_default().push(e.child.as_str());
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: HashMap<&str, u8> = HashMap::new();
    for start in nodes.keys() {
        if state.get(start.as_str()).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(&str, usize)> = vec![(start.as_str(), 0)];
        state.insert(start.as_str(), 1);
        while let Some((u, i)) = stack.pop() {
            let next = adj.get(u).and_then(|v| v.get(i)).copied();
            match next {
                Some(v) => {
                    stack.push((u, i + 1));
                    match state.get(v).copied().unwrap_or(0) {
                        0 => {
                            state.insert(v, 1);
                            stack.push((v, 0));
                        }
                        1 => return Some(v.to_string()),
                        _ => {}
                    }
                }
                None => {
                    state.insert(u, 2);
                }
            }
        }
    }
    None
}

/// Checks every structural invariant of a passage; an empty result means valid.
pub fn validate(p: &UccaPassage) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut v = |kind: &'static str, subject: String| out.push(Violation { kind, subject });

    if !p.units.contains_key(&p.root) {
        v("missing root", p.root.clone());
        return out;
    }
    for (id, u) in &p.units {
        if &u.id != id {
            v("unit id mismatch", id.clone());
        }
    }
    let mut dangling = false;
    for e in &p.edges {
        for end in [&e.parent, &e.child] {
            if !p.units.contains_key(end) {
                v("edge to unknown unit", format!("{} -> {}", e.parent, e.child));
                dangling = true;
            }
        }
        if e.categories.is_empty() {
            v("edge without category", format!("{} -> {}", e.parent, e.child));
        }
        if e.remote && e.categories.contains(Category::U) {
            v("remote edge with U", format!("{} -> {}", e.parent, e.child));
        }
        if e.parent == e.child {
            v("self loop", e.parent.clone());
        }
    }
    if dangling {
        return out;
    }

    let mut primary_parents: HashMap<&str, usize> = HashMap::new();
    for e in p.edges.iter().filter(|e| !e.remote) {
        *primary_parents.entry(e.child.as_str()).or_default() += 1;
    }
    for (id, u) in &p.units {
        let n = primary_parents.get(id.as_str()).copied().unwrap_or(0);
        if id == &p.root {
            if n > 0 {
                v("root has a primary parent", id.clone());
            }
        } else if n == 0 {
            v("no primary parent", id.clone());
        } else if n > 1 {
            v("multiple primary parents", id.clone());
        }
        let has_children = p.primary_children(id).next().is_some();
        if !u.anchors.is_empty() && has_children {
            v("leaf with children", id.clone());
        }
        if u.anchors.is_empty() && !has_children && !(id == &p.root && p.terminals.is_empty()) {
            v("empty unit", id.clone());
        }
        for &a in &u.anchors {
            if a == 0 || a > p.terminals.len() {
                v("anchor out of range", format!("{id}:{a}"));
            }
        }
    }

    let primary: Vec<&UccaEdge> = p.edges.iter().filter(|e| !e.remote).collect();
    let all: Vec<&UccaEdge> = p.edges.iter().collect();
    if let Some(u) = has_cycle(&p.units, &primary) {
        v("cycle in primary edges", u);
    } else if let Some(u) = has_cycle(&p.units, &all) {
        v("cycle via remote", u);
    }

    let mut reach = BTreeSet::new();
    let mut stack = vec![p.root.as_str()];
    while let Some(x) = stack.pop() {
        if reach.insert(x) {
            stack.extend(p.primary_children(x).map(|e| e.child.as_str()));
        }
    }
    for id in p.units.keys() {
        if !reach.contains(id.as_str()) {
            v("unreachable from root", id.clone());
        }
    }

    let mut owner: HashMap<usize, &str> = HashMap::new();
    for (id, u) in &p.units {
        for &a in &u.anchors {
            if let Some(prev) = owner.insert(a, id) {
                v("token anchored twice", format!("{a} in {prev} and {id}"));
            }
        }
    }
    for t in 1..=p.terminals.len() {
        if !owner.contains_key(&t) {
            v("token not covered", t.to_string());
        }
    }
    out
}
