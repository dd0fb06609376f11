//! Events: a region of the schema paired with a time machine.
//!
//! Time is itself a thing that flows. A time machine records which of its
//! stages the event's time has already passed through; an event whose time
//! has left through Release and Transfer is over.

use std::collections::BTreeSet;

use fm_core::{Endpoint, Id, Schema, StageKind};
use serde::{Deserialize, Serialize};

use crate::EventError;

/// The time course of one event. `traversed` is the subset of
/// `stages_present` that time has already passed; time leaves an event via
/// Release then Transfer, so Transfer may only be traversed alongside
/// Release.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TimeRepr", into = "TimeRepr")]
pub struct TimeMachine {
    stages_present: BTreeSet<StageKind>,
    traversed: BTreeSet<StageKind>,
}

const TIME_STAGES: [StageKind; 4] = [
    StageKind::Receive,
    StageKind::Process,
    StageKind::Release,
    StageKind::Transfer,
];

impl TimeMachine {
    pub fn new(
        stages_present: BTreeSet<StageKind>,
        traversed: BTreeSet<StageKind>,
    ) -> Result<TimeMachine, EventError> {
        if !traversed.is_subset(&stages_present) {
            return Err(EventError::Region(
                "time machine traversed stages must be among its declared stages".into(),
            ));
        }
        if traversed.contains(&StageKind::Transfer) && !traversed.contains(&StageKind::Release) {
            return Err(EventError::Region(
                "time leaves via Release then Transfer; Transfer cannot be traversed alone".into(),
            ));
        }
        Ok(TimeMachine {
            stages_present,
            traversed,
        })
    }

    /// Time has not arrived: nothing traversed.
    pub fn future() -> TimeMachine {
        TimeMachine {
            stages_present: TIME_STAGES.into(),
            traversed: BTreeSet::new(),
        }
    }

    /// Time is at Process ("now"): the event is under way.
    pub fn present() -> TimeMachine {
        TimeMachine {
            stages_present: TIME_STAGES.into(),
            traversed: [StageKind::Receive, StageKind::Process].into(),
        }
    }

    /// Time has run through and left: the event is over.
    pub fn past() -> TimeMachine {
        TimeMachine {
            stages_present: TIME_STAGES.into(),
            traversed: TIME_STAGES.into(),
        }
    }

    pub fn stages_present(&self) -> &BTreeSet<StageKind> {
        &self.stages_present
    }

    pub fn traversed(&self) -> &BTreeSet<StageKind> {
        &self.traversed
    }
}

/// Serialized form: either a shorthand name or the explicit stage sets.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TimeRepr {
    Named(String),
    Explicit {
        stages_present: BTreeSet<StageKind>,
        traversed: BTreeSet<StageKind>,
    },
}

impl TryFrom<TimeRepr> for TimeMachine {
    type Error = String;

    fn try_from(repr: TimeRepr) -> Result<TimeMachine, String> {
        match repr {
            TimeRepr::Named(name) => match name.as_str() {
                "past" => Ok(TimeMachine::past()),
                "present" => Ok(TimeMachine::present()),
                "future" => Ok(TimeMachine::future()),
                other => Err(format!(
                    "unknown time shorthand {other:?}; use past, present, or future"
                )),
            },
            TimeRepr::Explicit {
                stages_present,
                traversed,
            } => TimeMachine::new(stages_present, traversed).map_err(|e| e.to_string()),
        }
    }
}

impl From<TimeMachine> for TimeRepr {
    fn from(t: TimeMachine) -> TimeRepr {
        TimeRepr::Explicit {
            stages_present: t.stages_present,
            traversed: t.traversed,
        }
    }
}

/// How often an event's walk recurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RepetitionRepr", into = "RepetitionRepr")]
pub enum Repetition {
    /// A known, positive number of occurrences.
    Count(u32),
    /// Still recurring with no set end; simulation truncates at its
    /// repetition bound and flags the trace incomplete.
    UnboundedOngoing,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RepetitionRepr {
    Count(u32),
    Tag(String),
}

impl TryFrom<RepetitionRepr> for Repetition {
    type Error = String;

    fn try_from(repr: RepetitionRepr) -> Result<Repetition, String> {
        match repr {
            RepetitionRepr::Count(0) => Err("repetition count must be positive".into()),
            RepetitionRepr::Count(n) => Ok(Repetition::Count(n)),
            RepetitionRepr::Tag(tag) if tag == "unbounded" => Ok(Repetition::UnboundedOngoing),
            RepetitionRepr::Tag(tag) => {
                Err(format!("unknown repetition {tag:?}; use a count or \"unbounded\""))
            }
        }
    }
}

impl From<Repetition> for RepetitionRepr {
    fn from(r: Repetition) -> RepetitionRepr {
        match r {
            Repetition::Count(n) => RepetitionRepr::Count(n),
            Repetition::UnboundedOngoing => RepetitionRepr::Tag("unbounded".into()),
        }
    }
}

/// The part of the schema an event covers: a set of stage endpoints plus
/// the flows (by id) the event's walk may follow. Closed: a listed flow's
/// endpoints are both in `stages`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub stages: BTreeSet<Endpoint>,
    pub flows: BTreeSet<Id>,
}

impl Region {
    pub fn new(
        stages: impl IntoIterator<Item = Endpoint>,
        flows: impl IntoIterator<Item = Id>,
    ) -> Region {
        Region {
            stages: stages.into_iter().collect(),
            flows: flows.into_iter().collect(),
        }
    }

    /// The region covering the whole schema: every declared stage and flow.
    pub fn whole_schema(schema: &Schema) -> Region {
        let stages = schema
            .machines
            .iter()
            .flat_map(|m| {
                m.stages
                    .iter()
                    .map(|s| Endpoint::new(m.id.clone(), *s))
                    .collect::<Vec<_>>()
            })
            .collect();
        let flows = schema.flows.iter().map(|f| f.id.clone()).collect();
        Region { stages, flows }
    }

    pub fn is_subregion_of(&self, other: &Region) -> bool {
        self.stages.is_subset(&other.stages) && self.flows.is_subset(&other.flows)
    }
}

/// One event: a region of the schema run through under a time machine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub id: Id,
    pub region: Region,
    pub time: TimeMachine,
    /// Stages of the event's own machine (an event is itself a thing that
    /// can be owned or processed). Always contains Process.
    #[serde(default = "default_event_stages")]
    pub event_stages: BTreeSet<StageKind>,
    #[serde(default)]
    pub repetition: Option<Repetition>,
}

pub(crate) fn default_event_stages() -> BTreeSet<StageKind> {
    [StageKind::Process].into()
}

/// Builds an event over `region`, resolving and checking the region
/// against the schema.
pub fn eventize(
    schema: &Schema,
    id: Id,
    region: Region,
    time: TimeMachine,
    repetition: Option<Repetition>,
) -> Result<Event, EventError> {
    let event = Event {
        id,
        region,
        time,
        event_stages: default_event_stages(),
        repetition,
    };
    check_event(schema, &event).map_err(EventError::Region)?;
    Ok(event)
}

/// Region and event invariants, reported as a plain message so callers can
/// wrap it in the error that fits their operation.
pub(crate) fn check_event(schema: &Schema, event: &Event) -> Result<(), String> {
    let id = &event.id;
    if event.region.stages.is_empty() {
        return Err(format!("event `{id}`: region has no stages"));
    }
    for endpoint in &event.region.stages {
        if !schema.has_endpoint(endpoint) {
            return Err(format!(
                "event `{id}`: region names stage {} on `{}`, which the schema does not declare",
                endpoint.stage, endpoint.machine
            ));
        }
    }
    for flow_id in &event.region.flows {
        let Some(flow) = schema.flow(flow_id) else {
            return Err(format!(
                "event `{id}`: region names unknown flow `{flow_id}`"
            ));
        };
        if !event.region.stages.contains(&flow.from) || !event.region.stages.contains(&flow.to) {
            return Err(format!(
                "event `{id}`: region flow `{flow_id}` reaches outside the region's stages"
            ));
        }
    }
    if !event.event_stages.contains(&StageKind::Process) {
        return Err(format!(
            "event `{id}`: an event runs its course, so its stages must include Process"
        ));
    }
    if event.repetition == Some(Repetition::Count(0)) {
        return Err(format!("event `{id}`: repetition count must be positive"));
    }
    Ok(())
}

/// Has the event's time left through Release and Transfer?
pub fn is_complete(event: &Event) -> bool {
    event.time.traversed().contains(&StageKind::Release)
        && event.time.traversed().contains(&StageKind::Transfer)
}
