//! Closed word lists shared by both converters.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

/// Field names, which double as default file stems.
pub const FIELDS: [&str; 8] = [
    "relational_suffixes",
    "kinship_terms",
    "occupation_terms",
    "aspectual_verbs",
    "quantity_adjectives",
    "locative_proadverbs",
    "discourse_words",
    "part_of_day_nouns",
];

const BUILTIN: [(&str, &str); 8] = [
    (
        "relational_suffixes",
        include_str!("../data/lexicons/relational_suffixes.txt"),
    ),
    ("kinship_terms", include_str!("../data/lexicons/kinship_terms.txt")),
    (
        "occupation_terms",
        include_str!("../data/lexicons/occupation_terms.txt"),
    ),
    ("aspectual_verbs", include_str!("../data/lexicons/aspectual_verbs.txt")),
    (
        "quantity_adjectives",
        include_str!("../data/lexicons/quantity_adjectives.txt"),
    ),
    (
        "locative_proadverbs",
        include_str!("../data/lexicons/locative_proadverbs.txt"),
    ),
    ("discourse_words", include_str!("../data/lexicons/discourse_words.txt")),
    (
        "part_of_day_nouns",
        include_str!("../data/lexicons/part_of_day_nouns.txt"),
    ),
];

/// Relational nouns come in two flavours: kinship-like (`A|S`) and role/occupation (`A|P`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationalKind {
    State,
    Process,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexiconSet {
    pub relational_suffixes: Vec<String>,
    pub kinship_terms: BTreeSet<String>,
    pub occupation_terms: BTreeSet<String>,
    pub aspectual_verbs: BTreeSet<String>,
    pub quantity_adjectives: BTreeSet<String>,
    pub locative_proadverbs: BTreeSet<String>,
    pub discourse_words: BTreeSet<String>,
    pub part_of_day_nouns: BTreeSet<String>,
    /// SHA-256 of each loaded list's raw bytes, by field name.
    pub hashes: BTreeMap<String, String>,
}

fn entries(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.to_lowercase())
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl LexiconSet {
    fn set_field(&mut self, field: &str, text: &str) {
        let list = entries(text);
        let set = || list.iter().cloned().collect::<BTreeSet<_>>();
        match field {
            "relational_suffixes" => {
                self.relational_suffixes = list
                    .iter()
                    .map(|s| s.trim_start_matches('-').to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }
            "kinship_terms" => self.kinship_terms = set(),
            "occupation_terms" => self.occupation_terms = set(),
            "aspectual_verbs" => self.aspectual_verbs = set(),
            "quantity_adjectives" => self.quantity_adjectives = set(),
            "locative_proadverbs" => self.locative_proadverbs = set(),
            "discourse_words" => self.discourse_words = set(),
            "part_of_day_nouns" => self.part_of_day_nouns = set(),
            _ => return,
        }
        self.hashes.insert(field.to_string(), sha256_hex(text.as_bytes()));
    }

    /// The seed lists compiled into the library.
    pub fn builtin() -> Self {
        let mut lex = LexiconSet::default();
        for (field, text) in BUILTIN {
            lex.set_field(field, text);
        }
        lex
    }

    /// Loads one list file per field from `dir`. A `manifest.tsv` (`field<TAB>path`)
    /// overrides the default `<field>.txt` names. Missing files yield empty lists
    /// and a warning.
    pub fn load(dir: &Path) -> Result<(LexiconSet, Vec<String>), LexiconError> {
        let mut paths: BTreeMap<String, PathBuf> = FIELDS
            .iter()
            .map(|f| (f.to_string(), dir.join(format!("{f}.txt"))))
            .collect();
        let manifest = dir.join("manifest.tsv");
        if manifest.is_file() {
            let text = fs::read_to_string(&manifest).map_err(|e| LexiconError::Read {
                path: manifest.clone(),
                message: e.to_string(),
            })?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (field, path) = line.split_once('\t').ok_or(LexiconError::Manifest {
                    line: i + 1,
                    message: "expected `field<TAB>path`".into(),
                })?;
                if !FIELDS.contains(&field) {
                    return Err(LexiconError::Manifest {
                        line: i + 1,
                        message: format!("unknown field `{field}`"),
                    });
                }
                paths.insert(field.to_string(), dir.join(path.trim()));
            }
        }
        let mut lex = LexiconSet::default();
        let mut warnings = Vec::new();
        for (field, path) in &paths {
            if !path.exists() {
                warnings.push(format!(
                    "lexicon {field}: {} not found, using empty list",
                    path.display()
                ));
                continue;
            }
            let text = fs::read_to_string(path).map_err(|e| LexiconError::Read {
                path: path.clone(),
                message: e.to_string(),
            })?;
            lex.set_field(field, &text);
        }
        Ok((lex, warnings))
    }

    /// Combined digest over all list hashes.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.hashes {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    fn has(set: &BTreeSet<String>, lemma: &str) -> bool {
        !lemma.is_empty() && set.contains(&lemma.to_lowercase())
    }

    pub fn is_relational_noun(&self, lemma: &str, ss: Option<&str>) -> bool {
        self.relational_kind(lemma, ss).is_some()
    }

    pub fn relational_kind(&self, lemma: &str, ss: Option<&str>) -> Option<RelationalKind> {
        let ss = ss.map(str::to_lowercase);
        if !matches!(ss.as_deref(), Some("n.person") | Some("n.group")) {
            return None;
        }
        let lemma = lemma.to_lowercase();
        if Self::has(&self.kinship_terms, &lemma) {
            return Some(RelationalKind::State);
        }
        let suffix = self
            .relational_suffixes
            .iter()
            .any(|s| lemma.len() > s.len() && lemma.ends_with(s.as_str()));
        if suffix || Self::has(&self.occupation_terms, &lemma) {
            return Some(RelationalKind::Process);
        }
        None
    }

    pub fn is_aspectual(&self, lemma: &str) -> bool {
        Self::has(&self.aspectual_verbs, lemma)
    }

    pub fn is_quantity_adj(&self, lemma: &str) -> bool {
        Self::has(&self.quantity_adjectives, lemma)
    }

    pub fn is_locative_proadverb(&self, lemma: &str) -> bool {
        Self::has(&self.locative_proadverbs, lemma)
    }

    pub fn is_part_of_day(&self, lemma: &str) -> bool {
        Self::has(&self.part_of_day_nouns, lemma)
    }

    pub fn is_discourse_word(&self, lemma: &str) -> bool {
        Self::has(&self.discourse_words, lemma)
    }
}
