//! Deterministic stepping of a chronology: each event's region is walked
//! occurrence by occurrence, in temporal order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use fm_core::{Endpoint, Id, Schema};
use serde::{Deserialize, Serialize};

use crate::event::{check_event, Event, Repetition};
use crate::graph::{topological_order, EventGraph};
use crate::EventError;

/// One visited endpoint in a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub event: Id,
    pub rep_index: u32,
    pub endpoint: Endpoint,
}

/// The full output of a simulation run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub temporal_order: Vec<Id>,
    /// True when some event is still recurring and was cut off at the
    /// repetition bound.
    pub incomplete: bool,
}

impl Trace {
    /// Line-oriented text form: a temporal-order header, a status line,
    /// then one tab-separated line per step.
    pub fn to_text(&self) -> String {
        let mut out = String::from("temporal_order");
        for id in &self.temporal_order {
            out.push('\t');
            out.push_str(id.as_ref());
        }
        out.push('\n');
        out.push_str("status\t");
        out.push_str(if self.incomplete { "incomplete" } else { "complete" });
        out.push('\n');
        for step in &self.steps {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                step.event, step.rep_index, step.endpoint.machine, step.endpoint.stage
            ));
        }
        out
    }
}

/// Runs every event of the chronology in temporal order. Events that
/// recur run `min(count, rep_bound)` times; whenever the bound cuts off
/// occurrences the trace is marked incomplete.
pub fn simulate(
    graph: &EventGraph,
    schema: &Schema,
    rep_bound: u32,
) -> Result<Trace, EventError> {
    if rep_bound == 0 {
        return Err(EventError::Graph("repetition bound must be positive".into()));
    }
    let mut ids = BTreeSet::new();
    for event in &graph.events {
        if !ids.insert(event.id.clone()) {
            return Err(EventError::Graph(format!(
                "duplicate event id `{}`",
                event.id
            )));
        }
        check_event(schema, event).map_err(EventError::Graph)?;
    }
    for (from, to) in &graph.edges {
        for id in [from, to] {
            if !ids.contains(id) {
                return Err(EventError::Graph(format!(
                    "edge {from} -> {to} names unknown event `{id}`"
                )));
            }
        }
    }
    let temporal_order = topological_order(&ids, &graph.edges)
        .map_err(|id| EventError::Cycle(format!("temporal edges cycle through `{id}`")))?;

    let mut steps = Vec::new();
    let mut incomplete = false;
    for id in &temporal_order {
        let event = graph.event(id).expect("order drawn from graph ids");
        let occurrences = match event.repetition {
            None => 1,
            Some(Repetition::Count(n)) => {
                incomplete |= n > rep_bound;
                n.min(rep_bound)
            }
            Some(Repetition::UnboundedOngoing) => {
                incomplete = true;
                rep_bound
            }
        };
        for rep_index in 0..occurrences {
            for endpoint in walk_region(schema, event) {
                steps.push(TraceStep {
                    event: id.clone(),
                    rep_index,
                    endpoint,
                });
            }
        }
    }
    Ok(Trace {
        steps,
        temporal_order,
        incomplete,
    })
}

/// The endpoints of one event occurrence, in execution order.
///
/// Flow sources that nothing inside the region feeds start the walk;
/// endpoints awoken by an in-region trigger run after the walk that fired
/// them. Within a machine, stages start in flow order (Create, Receive,
/// Process, Release, Transfer), not name order.
fn walk_region(schema: &Schema, event: &Event) -> Vec<Endpoint> {
    let region = &event.region;
    let mut flows_from: BTreeMap<&Endpoint, Vec<&Endpoint>> = BTreeMap::new();
    let mut has_inbound: BTreeSet<&Endpoint> = BTreeSet::new();
    for flow_id in &region.flows {
        let flow = schema.flow(flow_id).expect("region checked against schema");
        flows_from.entry(&flow.from).or_default().push(&flow.to);
        has_inbound.insert(&flow.to);
    }
    for targets in flows_from.values_mut() {
        targets.sort_by_key(|e| walk_key(e));
    }

    // Triggers count as in-region only when both endpoints are; they wake
    // their target rather than letting it start on its own.
    let mut triggers_from: BTreeMap<&Endpoint, Vec<&Endpoint>> = BTreeMap::new();
    let mut trigger_targets: BTreeSet<&Endpoint> = BTreeSet::new();
    let mut in_region_triggers: Vec<&fm_core::Trigger> = schema
        .triggers
        .iter()
        .filter(|t| region.stages.contains(&t.from) && region.stages.contains(&t.to))
        .collect();
    in_region_triggers.sort_by_key(|t| (walk_key(&t.to), &t.id));
    for trigger in in_region_triggers {
        triggers_from.entry(&trigger.from).or_default().push(&trigger.to);
        trigger_targets.insert(&trigger.to);
    }

    let mut starts: Vec<&Endpoint> = region
        .stages
        .iter()
        .filter(|e| !has_inbound.contains(e) && !trigger_targets.contains(e))
        .collect();
    starts.sort_by_key(|e| walk_key(e));

    let mut queue: VecDeque<&Endpoint> = starts.into_iter().collect();
    let mut visited: BTreeSet<&Endpoint> = BTreeSet::new();
    let mut order = Vec::new();
    while let Some(start) = queue.pop_front() {
        let mut stack = vec![start];
        while let Some(endpoint) = stack.pop() {
            if !visited.insert(endpoint) {
                continue;
            }
            order.push(endpoint.clone());
            for &woken in triggers_from.get(endpoint).into_iter().flatten() {
                queue.push_back(woken);
            }
            if let Some(nexts) = flows_from.get(endpoint) {
                for &next in nexts.iter().rev() {
                    stack.push(next);
                }
            }
        }
    }
    order
}

fn walk_key(endpoint: &Endpoint) -> (&Id, u8) {
    (&endpoint.machine, endpoint.stage.walk_rank())
}

/// The endpoints the named event visits in its first occurrence.
pub fn operational_sequence(trace: &Trace, event: &Id) -> Result<Vec<Endpoint>, EventError> {
    if !trace.temporal_order.contains(event) {
        return Err(EventError::NoEvent(event.clone()));
    }
    Ok(trace
        .steps
        .iter()
        .filter(|s| &s.event == event && s.rep_index == 0)
        .map(|s| s.endpoint.clone())
        .collect())
}
