//! Rule-based conversion of one annotated sentence into a UCCA passage.
//!
//! The pipeline runs eleven passes over a [`WorkGraph`]; each is exposed so
//! intermediate states can be inspected with [`WorkGraph::bracket`].

mod attach;
pub(crate) mod classify;
mod finish;
pub mod graph;

use thiserror::Error;

use crate::conllulex::{ConlluLexError, Sentence};
use crate::lexicons::LexiconSet;
use crate::ucca::UccaPassage;

pub use attach::{attach_arguments, attach_function_words, attach_modifiers, build_coordination};
pub use classify::{classify_main_relations, init_units, split_iav};
pub use finish::{articulate_heads, cleanup, resolve_scene_category, restructure_secondary_verbs};
pub use graph::{Label, WorkGraph};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error(transparent)]
    Input(#[from] ConlluLexError),
    #[error("sentence `{sent_id}` is malformed: {message}")]
    Malformed { sent_id: String, message: String },
    #[error("sentence `{sent_id}`: scene unit {unit:?} is neither state nor process")]
    Unresolved { sent_id: String, unit: Vec<usize> },
}

/// Named intermediate renderings produced by [`convert_traced`].
pub type Trace = Vec<(String, String)>;

fn run(s: &Sentence, lex: &LexiconSet, tracing: bool) -> Result<(UccaPassage, Trace, Vec<String>), RuleError> {
    let problems = s.check();
    if !problems.is_empty() {
        return Err(RuleError::Malformed {
            sent_id: s.sent_id.clone(),
            message: problems.join("; "),
        });
    }
    let mut g = init_units(split_iav(s.clone()))?;
    if tracing {
        g.trace = Some(Vec::new());
    }
    let mut trace: Trace = Vec::new();
    let mut record = |g: &mut WorkGraph, name: &str, with_root: bool| {
        if let Some(inner) = g.trace.as_mut() {
            for (sub, text) in inner.drain(..) {
                trace.push((format!("{name}/{sub}"), text));
            }
            trace.push((name.to_string(), g.bracket(with_root)));
        }
    };
    g = classify_main_relations(g, lex);
    record(&mut g, "classify", true);
    g = attach_function_words(g, lex);
    record(&mut g, "function_words", false);
    g = attach_modifiers(g, lex);
    record(&mut g, "modifiers", false);
    g = attach_arguments(g, lex);
    record(&mut g, "arguments", false);
    g = build_coordination(g, lex);
    record(&mut g, "coordination", false);
    g = resolve_scene_category(g, lex)?;
    record(&mut g, "scene_category", false);
    g = restructure_secondary_verbs(g, lex);
    record(&mut g, "secondary_verbs", false);
    g = articulate_heads(g, lex);
    record(&mut g, "heads", false);
    g = cleanup(g, lex);
    record(&mut g, "cleanup", false);
    let passage = g.to_passage(&s.sent_id);
    for n in &g.notes {
        log::debug!("{}: {n}", s.sent_id);
    }
    Ok((passage, trace, g.notes))
}

/// Converts a sentence. Total on sentences whose `check()` is clean.
pub fn convert(s: &Sentence, lex: &LexiconSet) -> Result<UccaPassage, RuleError> {
    run(s, lex, false).map(|(p, _, _)| p)
}

/// Like [`convert`], also returning the rendering after each pass (and after
/// each coordination and cleanup sub-step).
pub fn convert_traced(s: &Sentence, lex: &LexiconSet) -> Result<(UccaPassage, Trace), RuleError> {
    run(s, lex, true).map(|(p, t, _)| (p, t))
}

/// Like [`convert`], also returning notes about discarded or coerced structure.
pub fn convert_with_notes(s: &Sentence, lex: &LexiconSet) -> Result<(UccaPassage, Vec<String>), RuleError> {
    run(s, lex, false).map(|(p, _, n)| (p, n))
}
