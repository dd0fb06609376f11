//! Text and JSON formats for flow-machine schemas.
//!
//! The text format:
//!
//! ```text
//! schema {
//!   sphere i "I" {
//!     machine book_i thing "book" stages [Release Transfer]
//!   }
//!   flow f1: book_i.Release -> book_i.Transfer ;
//!   trigger t1: book_i.Release ~> book_i.Transfer ;
//! }
//! ```
//!
//! `parse` is purely syntactic; structural checks live in `fm_core::validate`.
//! `print` emits the canonical form, so `parse(print(s)) == canonicalize(s)`
//! and printing a canonical schema twice is byte-identical.

mod json;
mod lexer;
mod parser;
mod printer;

use thiserror::Error;

pub use json::{from_json, to_json, SCHEMA_VERSION};
pub use lexer::SourceSpan;
pub use parser::{parse, ParseError, MAX_DEPTH, MAX_ERRORS};
pub use printer::{escape_label, print};

#[derive(Debug, Error)]
pub enum DslError {
    /// The schema has validation diagnostics and cannot be serialized.
    #[error("E_INVALID: {0}")]
    Invalid(#[from] fm_core::InvalidSchema),
    /// Input is not well-formed JSON or does not match the document shape.
    #[error("E_JSON: {0}")]
    Json(String),
    /// The JSON document declares a schema_version this build cannot read.
    #[error("E_VERSION: schema_version {0:?} is not supported (expected \"1\")")]
    Version(String),
}
