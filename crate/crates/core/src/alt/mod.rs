//! Alternative converter: dependency promotions, a majority relation-to-category
//! mapping with lexical overrides, and category repairs.

mod labels;
pub mod mapping;
mod postprocess;
mod scene;
pub mod transform;

use crate::conllulex::Sentence;
use crate::lexicons::LexiconSet;
use crate::ucca::UccaPassage;

pub use labels::map_labels;
pub use mapping::{
    train_majority_mapping, train_majority_mapping_with_warnings, MajorityMapping, MappingCounts, MappingEntry,
    MappingError,
};
pub use postprocess::{postprocess, postprocess_checked, MAX_ROUNDS};
pub use scene::{classify_scene_evoking, SceneClass};
pub use transform::{transform_dependencies, transform_dependencies_with_warnings};

/// Which rule layers run on top of the dependency tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AltMode {
    /// Mapping plus every lexical and structural override.
    #[default]
    Full,
    /// Mapping only; lexical annotation is ignored.
    SyntaxOnly,
}

/// Converts with warnings about unseen relations and skipped promotions.
pub fn convert_alt_with_warnings(
    s: &Sentence,
    m: &MajorityMapping,
    lex: &LexiconSet,
    mode: AltMode,
) -> (UccaPassage, Vec<String>) {
    let (t, mut warnings, _) = transform_dependencies_with_warnings(s);
    let (p, w) = labels::map_labels_full(&t, s, m, lex, mode == AltMode::Full);
    warnings.extend(w);
    let (out, settled) = postprocess_checked(&p);
    if !settled {
        warnings.push(format!(
            "{}: postprocessing did not settle in {MAX_ROUNDS} rounds",
            s.sent_id
        ));
    }
    (out, warnings)
}

pub fn convert_alt(s: &Sentence, m: &MajorityMapping, lex: &LexiconSet) -> UccaPassage {
    convert_alt_mode(s, m, lex, AltMode::Full)
}

pub fn convert_alt_mode(s: &Sentence, m: &MajorityMapping, lex: &LexiconSet, mode: AltMode) -> UccaPassage {
    let (p, warnings) = convert_alt_with_warnings(s, m, lex, mode);
    for w in warnings {
        log::debug!("{w}");
    }
    p
}
