//! English verbs as schema templates: a verb table, class shapes that
//! instantiate into valid schemas, tense as event structure, and
//! aspectual classification read off the event graph.

mod lexicon;
mod tense;
mod vendler;

pub use lexicon::{
    theme_walk, ClassDef, DynamicStative, Lexicon, LexiconEntry, RoleBinding,
};
pub use tense::{apply_tense, Tense, TensedModel, ALL_TENSES};
pub use vendler::{classify_vendler, VendlerCategory};

use fm_events::EventError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerbError {
    #[error("E_UNKNOWN_VERB: `{0}` is not in the lexicon")]
    UnknownVerb(String),
    #[error("E_UNKNOWN_CLASS: `{0}` is not a known verb class")]
    UnknownClass(String),
    /// Role binding does not line up with the template's slots.
    #[error("E_BINDING: {0}")]
    Binding(String),
    /// Malformed lexicon data, template, or file.
    #[error("E_DATA: {0}")]
    Data(String),
    #[error(transparent)]
    Event(#[from] EventError),
}

impl VerbError {
    pub fn code(&self) -> &'static str {
        match self {
            VerbError::UnknownVerb(_) => "E_UNKNOWN_VERB",
            VerbError::UnknownClass(_) => "E_UNKNOWN_CLASS",
            VerbError::Binding(_) => "E_BINDING",
            VerbError::Data(_) => "E_DATA",
            VerbError::Event(e) => e.code(),
        }
    }
}
