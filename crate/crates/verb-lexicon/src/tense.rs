//! Tense as event structure: where the event's own time stands, and how
//! the event sits against a "now" marker in the chronology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fm_core::{Endpoint, Id, Machine, Schema, Sphere, StageKind};
use fm_events::{
    build_chronology, eventize, Event, EventGraph, Region, Repetition, TimeMachine,
};

use crate::VerbError;

/// The nine tense/aspect combinations that have an event encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tense {
    SimplePresent,
    SimplePast,
    SimpleFuture,
    PresentProgressive,
    PastProgressive,
    FutureProgressive,
    PresentPerfect,
    PastPerfect,
    FuturePerfect,
}

pub const ALL_TENSES: [Tense; 9] = [
    Tense::SimplePresent,
    Tense::SimplePast,
    Tense::SimpleFuture,
    Tense::PresentProgressive,
    Tense::PastProgressive,
    Tense::FutureProgressive,
    Tense::PresentPerfect,
    Tense::PastPerfect,
    Tense::FuturePerfect,
];

impl Tense {
    pub fn name(self) -> &'static str {
        match self {
            Tense::SimplePresent => "simple-present",
            Tense::SimplePast => "simple-past",
            Tense::SimpleFuture => "simple-future",
            Tense::PresentProgressive => "present-progressive",
            Tense::PastProgressive => "past-progressive",
            Tense::FutureProgressive => "future-progressive",
            Tense::PresentPerfect => "present-perfect",
            Tense::PastPerfect => "past-perfect",
            Tense::FuturePerfect => "future-perfect",
        }
    }

    pub fn from_name(name: &str) -> Option<Tense> {
        ALL_TENSES.iter().copied().find(|t| t.name() == name)
    }

    pub fn is_progressive(self) -> bool {
        matches!(
            self,
            Tense::PresentProgressive | Tense::PastProgressive | Tense::FutureProgressive
        )
    }

    pub fn is_perfect(self) -> bool {
        matches!(
            self,
            Tense::PresentPerfect | Tense::PastPerfect | Tense::FuturePerfect
        )
    }
}

impl fmt::Display for Tense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A tensed reading of a schema region: possibly augmented schema, plus
/// the event structure. `main_event` names the event that carries the
/// verb (sub-events and now markers sit alongside it).
#[derive(Clone, Debug)]
pub struct TensedModel {
    pub schema: Schema,
    pub graph: EventGraph,
    pub main_event: Id,
}

const MAIN: &str = "e1";
const NOW: &str = "now";
const STEP: &str = "step";

/// Where the now marker sits relative to the main event.
enum Marker {
    None,
    /// now precedes the event (the event is ahead).
    Before,
    /// the event precedes now (it is behind us).
    After,
}

/// Recasts a region of the schema as an event structure for the given
/// tense. The agent sphere is where perfect forms hang their "Have"
/// sub-sphere.
pub fn apply_tense(
    schema: &Schema,
    region: &Region,
    agent: &Id,
    tense: Tense,
) -> Result<TensedModel, VerbError> {
    if schema.sphere(agent).is_none() {
        return Err(VerbError::Event(fm_events::EventError::Region(format!(
            "agent sphere `{agent}` is not in the schema"
        ))));
    }
    match tense {
        Tense::SimplePresent => simple(schema, region, TimeMachine::present(), Marker::None),
        Tense::SimplePast => simple(schema, region, TimeMachine::past(), Marker::None),
        Tense::SimpleFuture => simple(schema, region, TimeMachine::future(), Marker::Before),
        Tense::PresentProgressive => progressive(schema, region, Marker::None),
        Tense::PastProgressive => progressive(schema, region, Marker::After),
        Tense::FutureProgressive => progressive(schema, region, Marker::Before),
        Tense::PresentPerfect => perfect(schema, region, agent, Marker::None),
        Tense::PastPerfect => perfect(schema, region, agent, Marker::After),
        Tense::FuturePerfect => perfect(schema, region, agent, Marker::Before),
    }
}

fn id(s: &str) -> Id {
    Id::new(s).expect("fixed event id")
}

/// The now marker: an event at its Process stage over the same scene.
fn now_event(schema: &Schema, region: &Region) -> Result<Event, VerbError> {
    Ok(eventize(
        schema,
        id(NOW),
        region.clone(),
        TimeMachine::present(),
        None,
    )?)
}

fn marker_edges(marker: &Marker, others: &[&str]) -> BTreeSet<(Id, Id)> {
    match marker {
        Marker::None => BTreeSet::new(),
        Marker::Before => others.iter().map(|o| (id(NOW), id(o))).collect(),
        Marker::After => others.iter().map(|o| (id(o), id(NOW))).collect(),
    }
}

fn simple(
    schema: &Schema,
    region: &Region,
    time: TimeMachine,
    marker: Marker,
) -> Result<TensedModel, VerbError> {
    let mut events = vec![eventize(schema, id(MAIN), region.clone(), time, None)?];
    let edges = marker_edges(&marker, &[MAIN]);
    if !matches!(marker, Marker::None) {
        events.push(now_event(schema, region)?);
    }
    let graph = build_chronology(events, edges, BTreeMap::new())?;
    Ok(TensedModel {
        schema: schema.clone(),
        graph,
        main_event: id(MAIN),
    })
}

fn progressive(
    schema: &Schema,
    region: &Region,
    marker: Marker,
) -> Result<TensedModel, VerbError> {
    let step_stages: BTreeSet<Endpoint> = region
        .stages
        .iter()
        .filter(|e| e.stage == StageKind::Process)
        .cloned()
        .collect();
    if step_stages.is_empty() {
        return Err(VerbError::Event(fm_events::EventError::Region(
            "a progressive keeps a Process stage going, but the region has none".into(),
        )));
    }

    // The whole is under way and never completes; each step runs fully
    // and recurs with no set end.
    let whole = eventize(schema, id(MAIN), region.clone(), TimeMachine::present(), None)?;
    let step = eventize(
        schema,
        id(STEP),
        Region::new(step_stages, []),
        TimeMachine::past(),
        Some(Repetition::UnboundedOngoing),
    )?;

    let mut events = vec![whole, step];
    let mut edges: BTreeSet<(Id, Id)> = [(id(MAIN), id(STEP))].into();
    if !matches!(marker, Marker::None) {
        events.push(now_event(schema, region)?);
        edges.extend(marker_edges(&marker, &[MAIN, STEP]));
    }
    let graph = build_chronology(events, edges, [(id(STEP), id(MAIN))].into())?;
    Ok(TensedModel {
        schema: schema.clone(),
        graph,
        main_event: id(MAIN),
    })
}

fn perfect(
    schema: &Schema,
    region: &Region,
    agent: &Id,
    marker: Marker,
) -> Result<TensedModel, VerbError> {
    // Perfects declare ownership of a finished event: the agent's sphere
    // grows a "Have" sub-sphere holding the event as a processable thing.
    let mut owned = schema.clone();
    let have_id = free_id(&owned, "have");
    let event_machine_id = free_id(&owned, "owned_event");
    owned.spheres.push(Sphere {
        id: have_id.clone(),
        label: "Have".into(),
        parent: Some(agent.clone()),
    });
    owned.machines.push(Machine {
        id: event_machine_id.clone(),
        thing: "event".into(),
        sphere: have_id,
        stages: [StageKind::Process].into(),
    });

    let mut owned_region = region.clone();
    owned_region
        .stages
        .insert(Endpoint::new(event_machine_id, StageKind::Process));

    let mut events = vec![eventize(
        &owned,
        id(MAIN),
        owned_region,
        TimeMachine::past(),
        None,
    )?];
    let edges = marker_edges(&marker, &[MAIN]);
    if !matches!(marker, Marker::None) {
        events.push(now_event(&owned, region)?);
    }
    let graph = build_chronology(events, edges, BTreeMap::new())?;
    Ok(TensedModel {
        schema: owned,
        graph,
        main_event: id(MAIN),
    })
}

/// `base`, or the first numbered form of it the schema has not taken.
fn free_id(schema: &Schema, base: &str) -> Id {
    let taken: BTreeSet<&Id> = schema
        .spheres
        .iter()
        .map(|s| &s.id)
        .chain(schema.machines.iter().map(|m| &m.id))
        .chain(schema.flows.iter().map(|f| &f.id))
        .chain(schema.triggers.iter().map(|t| &t.id))
        .collect();
    let mut candidate = Id::new(base).expect("caller passes a valid id");
    let mut n = 1;
    while taken.contains(&candidate) {
        n += 1;
        candidate = Id::new(format!("{base}_{n}")).expect("numbered form stays valid");
    }
    candidate
}
