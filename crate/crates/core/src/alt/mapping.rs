//! Majority mapping from dependency relations to UCCA categories.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::conllulex::Sentence;
use crate::ucca::{Category, UccaPassage};

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("mapping line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappingEntry {
    pub category: Category,
    pub count: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MajorityMapping {
    pub table: BTreeMap<String, MappingEntry>,
}

/// Raw co-occurrence counts, mergeable across workers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingCounts {
    pub cells: BTreeMap<String, BTreeMap<Category, usize>>,
    pub totals: BTreeMap<String, usize>,
}

impl MappingCounts {
    /// Counts, for every token, the categories on the incoming primary edge of
    /// the smallest unit containing it, keyed by the token's relation.
    pub fn observe(&mut self, s: &Sentence, p: &UccaPassage) -> Result<(), String> {
        if s.tokens.len() != p.terminals.len() {
            return Err(format!(
                "{}: {} tokens but passage {} has {} terminals",
                s.sent_id,
                s.tokens.len(),
                p.passage_id,
                p.terminals.len()
            ));
        }
        let yields = p.yields();
        let depth = |u: &str| {
            let mut d = 0;
            let mut cur = u.to_string();
            while let Some(e) = p.primary_parent(&cur) {
                cur = e.parent.clone();
                d += 1;
                if d > p.units.len() {
                    break;
                }
            }
            d
        };
        // Smallest yield wins; among equal yields the deepest unit.
        let mut best: Vec<Option<(usize, std::cmp::Reverse<usize>, &str)>> = vec![None; s.tokens.len()];
        for (id, y) in &yields {
            if *id == p.root {
                continue;
            }
            let key = (y.len(), std::cmp::Reverse(depth(id)), id.as_str());
            for &t in y {
                if t == 0 || t > s.tokens.len() {
                    continue;
                }
                if best[t - 1].is_none_or(|b| key < b) {
                    best[t - 1] = Some(key);
                }
            }
        }
        for (i, b) in best.iter().enumerate() {
            let Some((_, _, unit)) = b else { continue };
            let Some(edge) = p.primary_parent(unit) else { continue };
            let rel = s.tokens[i].deprel.clone();
            *self.totals.entry(rel.clone()).or_default() += 1;
            let row = self.cells.entry(rel).or_default();
            for c in edge.categories.iter() {
                *row.entry(c).or_default() += 1;
            }
        }
        Ok(())
    }

    pub fn merge(mut self, other: MappingCounts) -> MappingCounts {
        for (rel, row) in other.cells {
            let mine = self.cells.entry(rel).or_default();
            for (c, n) in row {
                *mine.entry(c).or_default() += n;
            }
        }
        for (rel, n) in other.totals {
            *self.totals.entry(rel).or_default() += n;
        }
        self
    }

    /// Argmax per relation; ties go to the smallest category code.
    pub fn finish(&self) -> MajorityMapping {
        let mut table = BTreeMap::new();
        for (rel, row) in &self.cells {
            let best = row
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.code().cmp(&a.0.code())));
            if let Some((&category, &count)) = best {
                table.insert(
                    rel.clone(),
                    MappingEntry {
                        category,
                        count,
                        total: self.totals.get(rel).copied().unwrap_or(count),
                    },
                );
            }
        }
        MajorityMapping { table }
    }
}

/// Trains a mapping; misaligned pairs are skipped and reported.
pub fn train_majority_mapping_with_warnings(pairs: &[(Sentence, UccaPassage)]) -> (MajorityMapping, Vec<String>) {
    let mut counts = MappingCounts::default();
    let mut warnings = Vec::new();
    for (s, p) in pairs {
        if let Err(w) = counts.observe(s, p) {
            warnings.push(w);
        }
    }
    (counts.finish(), warnings)
}

pub fn train_majority_mapping(pairs: &[(Sentence, UccaPassage)]) -> MajorityMapping {
    let (m, warnings) = train_majority_mapping_with_warnings(pairs);
    for w in warnings {
        log::warn!("{w}");
    }
    m
}

impl MajorityMapping {
    /// Category for a relation; subtyped relations fall back to their base.
    pub fn lookup(&self, deprel: &str) -> Option<Category> {
        self.table
            .get(deprel)
            .or_else(|| self.table.get(deprel.split(':').next().unwrap_or(deprel)))
            .map(|e| e.category)
    }

    /// SHA-256 of the TSV rendering.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_tsv().as_bytes()))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (rel, e) in &self.table {
            let _ = writeln!(out, "{rel}\t{}\t{}\t{}", e.category, e.count, e.total);
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, MappingError> {
        let mut table = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| MappingError::Parse { line: i + 1, message };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(err(format!("expected 4 columns, found {}", cols.len())));
            }
            let category: Category = cols[1].parse().map_err(|e| err(format!("{e}")))?;
            let count: usize = cols[2].parse().map_err(|_| err(format!("bad count `{}`", cols[2])))?;
            let total: usize = cols[3].parse().map_err(|_| err(format!("bad total `{}`", cols[3])))?;
            if count > total {
                return Err(err(format!("count {count} exceeds total {total}")));
            }
            table.insert(cols[0].to_string(), MappingEntry { category, count, total });
        }
        Ok(MajorityMapping { table })
    }
}
