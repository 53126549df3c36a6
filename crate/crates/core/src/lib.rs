//! Conversion of UD + STREUSLE annotations into UCCA graphs, and UCCA evaluation.

pub mod alt;
pub mod conllulex;
pub mod eval;
pub mod lexicons;
pub mod rule;
pub mod ucca;

pub use conllulex::{Document, LexExpr, Sentence, Token};
pub use lexicons::LexiconSet;
pub use ucca::{Category, CategorySet, UccaEdge, UccaPassage, UccaUnit};
