//! Chronology: a DAG of events ordered by "happens no later than".

use std::collections::{BTreeMap, BTreeSet};

use fm_core::{Id, Schema};
use serde::{Deserialize, Serialize};

use crate::event::{check_event, default_event_stages, Event, Region, Repetition, TimeMachine};
use crate::EventError;

/// Events plus their temporal edges. `edges` contains (earlier, later)
/// pairs; `sub_event_of` maps a sub-event to the event it decomposes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventGraph {
    pub events: Vec<Event>,
    pub edges: BTreeSet<(Id, Id)>,
    pub sub_event_of: BTreeMap<Id, Id>,
}

impl EventGraph {
    pub fn event(&self, id: &Id) -> Option<&Event> {
        self.events.iter().find(|e| &e.id == id)
    }
}

/// Assembles a chronology, rejecting dangling references, temporal cycles,
/// and sub-events that reach outside their parent's region.
pub fn build_chronology(
    events: Vec<Event>,
    edges: BTreeSet<(Id, Id)>,
    sub_event_of: BTreeMap<Id, Id>,
) -> Result<EventGraph, EventError> {
    let mut ids = BTreeSet::new();
    for event in &events {
        if !ids.insert(event.id.clone()) {
            return Err(EventError::Graph(format!(
                "duplicate event id `{}`",
                event.id
            )));
        }
    }
    for (from, to) in &edges {
        for id in [from, to] {
            if !ids.contains(id) {
                return Err(EventError::Graph(format!(
                    "edge {from} -> {to} names unknown event `{id}`"
                )));
            }
        }
    }
    for (child, parent) in &sub_event_of {
        for id in [child, parent] {
            if !ids.contains(id) {
                return Err(EventError::Graph(format!(
                    "sub-event entry {child} -> {parent} names unknown event `{id}`"
                )));
            }
        }
        if child == parent {
            return Err(EventError::Graph(format!(
                "event `{child}` cannot be a sub-event of itself"
            )));
        }
    }

    // Decomposition must not cycle (a is part of b is part of a).
    let mut seen = BTreeSet::new();
    for start in sub_event_of.keys() {
        let mut chain = BTreeSet::new();
        let mut cur = start;
        while let Some(parent) = sub_event_of.get(cur) {
            if !chain.insert(cur.clone()) {
                return Err(EventError::Cycle(format!(
                    "sub-event chain through `{start}` loops back on itself"
                )));
            }
            if seen.contains(parent) {
                break;
            }
            cur = parent;
        }
        seen.extend(chain);
    }

    for (child, parent) in &sub_event_of {
        let child_region = &find(&events, child).region;
        let parent_region = &find(&events, parent).region;
        if !child_region.is_subregion_of(parent_region) {
            return Err(EventError::SubRegion(format!(
                "sub-event `{child}` reaches outside the region of `{parent}`"
            )));
        }
    }

    if let Err(cycle) = topological_order(&ids, &edges) {
        return Err(EventError::Cycle(format!(
            "temporal edges cycle through `{cycle}`"
        )));
    }

    Ok(EventGraph {
        events,
        edges,
        sub_event_of,
    })
}

fn find<'a>(events: &'a [Event], id: &Id) -> &'a Event {
    events.iter().find(|e| &e.id == id).expect("checked above")
}

/// The lexicographically least linear extension of `edges` over `ids`, or
/// the least id on some cycle.
pub(crate) fn topological_order(
    ids: &BTreeSet<Id>,
    edges: &BTreeSet<(Id, Id)>,
) -> Result<Vec<Id>, Id> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut indegree: BTreeMap<&Id, usize> = ids.iter().map(|id| (id, 0)).collect();
    let mut successors: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (from, to) in edges {
        *indegree.get_mut(to).expect("edge targets checked") += 1;
        successors.entry(from).or_default().push(to);
    }

    let mut ready: BinaryHeap<Reverse<&Id>> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&id, _)| Reverse(id))
        .collect();
    let mut order = Vec::with_capacity(ids.len());
    while let Some(Reverse(id)) = ready.pop() {
        order.push(id.clone());
        for &next in successors.get(id).into_iter().flatten() {
            let d = indegree.get_mut(next).expect("edge targets checked");
            *d -= 1;
            if *d == 0 {
                ready.push(Reverse(next));
            }
        }
    }
    if order.len() == ids.len() {
        Ok(order)
    } else {
        let stuck = indegree
            .iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&id, _)| id)
            .min()
            .expect("some node on the cycle remains");
        Err(stuck.clone())
    }
}

/// On-disk form of a chronology: events with optional fields spelled out,
/// plus edges and decomposition. The schema is supplied separately when
/// the file is resolved.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EventsFile {
    pub events: Vec<EventSpec>,
    #[serde(default)]
    pub edges: Vec<(Id, Id)>,
    #[serde(default)]
    pub sub_event_of: BTreeMap<Id, Id>,
}

/// One event as written in an events file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventSpec {
    pub id: Id,
    pub region: Region,
    pub time: TimeMachine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_stages: Option<BTreeSet<fm_core::StageKind>>,
    #[serde(default)]
    pub repetition: Option<Repetition>,
}

/// Resolves an events file against a schema into a checked chronology.
pub fn build_from_specs(schema: &Schema, file: &EventsFile) -> Result<EventGraph, EventError> {
    let mut events = Vec::with_capacity(file.events.len());
    for spec in &file.events {
        let event = Event {
            id: spec.id.clone(),
            region: spec.region.clone(),
            time: spec.time.clone(),
            event_stages: spec.event_stages.clone().unwrap_or_else(default_event_stages),
            repetition: spec.repetition,
        };
        check_event(schema, &event).map_err(EventError::Region)?;
        events.push(event);
    }
    build_chronology(
        events,
        file.edges.iter().cloned().collect(),
        file.sub_event_of.clone(),
    )
}
