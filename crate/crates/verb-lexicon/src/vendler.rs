//! Aspectual classification from event structure alone.

use std::fmt;

use fm_core::{Schema, StageKind};
use fm_events::EventGraph;

/// The four aspectual categories. Only Activity and Accomplishment fall
/// out of event structure; Achievement and State exist as lexicon tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VendlerCategory {
    Activity,
    Accomplishment,
    Achievement,
    State,
}

impl VendlerCategory {
    pub fn name(self) -> &'static str {
        match self {
            VendlerCategory::Activity => "Activity",
            VendlerCategory::Accomplishment => "Accomplishment",
            VendlerCategory::Achievement => "Achievement",
            VendlerCategory::State => "State",
        }
    }

    pub fn from_name(name: &str) -> Option<VendlerCategory> {
        Some(match name {
            "Activity" => VendlerCategory::Activity,
            "Accomplishment" => VendlerCategory::Accomplishment,
            "Achievement" => VendlerCategory::Achievement,
            "State" => VendlerCategory::State,
            _ => return None,
        })
    }
}

impl fmt::Display for VendlerCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Separates accomplishments from activities by their set terminal point:
/// an accomplishment's repeated part feeds, by flow or trigger, a Create
/// stage outside itself (the product that ends it); an activity repeats
/// without producing one. Graphs with no repetition at all are neither,
/// and classify as None.
pub fn classify_vendler(graph: &EventGraph, schema: &Schema) -> Option<VendlerCategory> {
    let repeated: Vec<_> = graph
        .events
        .iter()
        .filter(|e| e.repetition.is_some())
        .collect();
    if repeated.is_empty() {
        return None;
    }
    let connections = schema
        .flows
        .iter()
        .map(|f| (&f.from, &f.to))
        .chain(schema.triggers.iter().map(|t| (&t.from, &t.to)));
    for (from, to) in connections {
        let feeds_outside_create = to.stage == StageKind::Create
            && repeated
                .iter()
                .any(|e| e.region.stages.contains(from) && !e.region.stages.contains(to));
        if feeds_outside_create {
            return Some(VendlerCategory::Accomplishment);
        }
    }
    Some(VendlerCategory::Activity)
}
