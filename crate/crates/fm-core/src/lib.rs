//! Core model for flow-machine conceptual schemas.
//!
//! A schema is a static map: nested spheres contain machines, each machine
//! moves one thing through up to five stages, and flows plus triggers
//! connect stages across the map. This crate owns the data types, the
//! stage-adjacency rules, structural validation, and canonical ordering.
//! Text and JSON formats live in `fm-dsl`; eventization lives in `fm-events`.

mod id;
mod schema;
mod stage;
mod validate;

pub use id::{Id, IdError};
pub use schema::{Endpoint, Flow, Machine, Schema, Sphere, Trigger};
pub use stage::StageKind;
pub use validate::{
    adjacency_allowed, validate, Diagnostic, DiagnosticCode, InvalidSchema, ADJACENT_STAGE_PAIRS,
};
