//! Dynamics on top of static schemas: events, chronologies, simulation.
//!
//! A static schema says what can flow where. An [`Event`] picks out a
//! region of it and attaches a time machine; [`build_chronology`] arranges
//! events into a before/after DAG; [`simulate`] runs the whole chronology
//! into a deterministic [`Trace`].

mod event;
mod graph;
mod simulate;

pub use event::{eventize, is_complete, Event, Region, Repetition, TimeMachine};
pub use graph::{build_chronology, build_from_specs, EventGraph, EventSpec, EventsFile};
pub use simulate::{operational_sequence, simulate, Trace, TraceStep};

use fm_core::Id;
use thiserror::Error;

/// Anything that can go wrong while eventizing, assembling, or running a
/// chronology.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EventError {
    /// A region is empty, open, or names parts the schema lacks.
    #[error("E_REGION: {0}")]
    Region(String),
    /// Temporal edges or sub-event chains loop.
    #[error("E_CYCLE: {0}")]
    Cycle(String),
    /// A sub-event's region escapes its parent's.
    #[error("E_SUBREGION: {0}")]
    SubRegion(String),
    /// Dangling references or malformed graph input.
    #[error("E_GRAPH: {0}")]
    Graph(String),
    /// A trace was asked about an event it never ran.
    #[error("E_NOEVENT: no event `{0}` in trace")]
    NoEvent(Id),
}

impl EventError {
    pub fn code(&self) -> &'static str {
        match self {
            EventError::Region(_) => "E_REGION",
            EventError::Cycle(_) => "E_CYCLE",
            EventError::SubRegion(_) => "E_SUBREGION",
            EventError::Graph(_) => "E_GRAPH",
            EventError::NoEvent(_) => "E_NOEVENT",
        }
    }
}
