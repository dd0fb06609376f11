//! Structural validation. Every problem is reported as a [`Diagnostic`]
//! carrying a stable code and the id of the offending element; the result
//! list is sorted by (code, location, message) so output is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::id::Id;
use crate::schema::{Endpoint, Schema};
use crate::stage::StageKind;

/// Legal stage successions within a single machine. Movement between
/// machines is not listed here: it is always Transfer to Transfer.
pub const ADJACENT_STAGE_PAIRS: [(StageKind, StageKind); 7] = [
    (StageKind::Create, StageKind::Process),
    (StageKind::Create, StageKind::Release),
    (StageKind::Process, StageKind::Release),
    (StageKind::Receive, StageKind::Process),
    (StageKind::Receive, StageKind::Release),
    (StageKind::Release, StageKind::Transfer),
    (StageKind::Transfer, StageKind::Receive),
];

/// May a flow step from `from` to `to`? `same_machine` selects between the
/// intra-machine adjacency table and the Transfer-to-Transfer rule that
/// governs movement between machines.
pub fn adjacency_allowed(from: StageKind, to: StageKind, same_machine: bool) -> bool {
    if same_machine {
        ADJACENT_STAGE_PAIRS.contains(&(from, to))
    } else {
        from == StageKind::Transfer && to == StageKind::Transfer
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    /// Intra-machine flow whose stage pair is not adjacent.
    Adjacency,
    /// Duplicate id; ids share one namespace across all element kinds.
    DuplicateId,
    /// Reference to a missing element, an undeclared stage, an empty stage
    /// set, or a degenerate trigger.
    Reference,
    /// Sphere parent chain forms a cycle.
    SphereCycle,
    /// Inter-machine flow that is not Transfer to Transfer.
    Transfer,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Adjacency => "E_ADJ",
            DiagnosticCode::DuplicateId => "E_DUP_ID",
            DiagnosticCode::Reference => "E_REF",
            DiagnosticCode::SphereCycle => "E_SPHERE_CYCLE",
            DiagnosticCode::Transfer => "E_XFER",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One validation finding. Displays as `CODE<TAB>location<TAB>message`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub location: Id,
    pub message: String,
}

impl Diagnostic {
    fn new(code: DiagnosticCode, location: &Id, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            code,
            location: location.clone(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.code.as_str(), self.location, self.message)
    }
}

/// Returned by operations that require a clean schema.
#[derive(Clone, Debug, Error)]
#[error("schema failed validation with {} diagnostic(s)", diagnostics.len())]
pub struct InvalidSchema {
    pub diagnostics: Vec<Diagnostic>,
}

/// Checks a schema and reports every finding. An empty result means the
/// schema is well formed. Unresolvable flow endpoints suppress the
/// adjacency check for that flow so one mistake is reported once.
pub fn validate(schema: &Schema) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_duplicate_ids(schema, &mut out);
    check_spheres(schema, &mut out);
    check_machines(schema, &mut out);
    check_flows(schema, &mut out);
    check_triggers(schema, &mut out);
    out.sort_by(|a, b| {
        (a.code, &a.location, &a.message).cmp(&(b.code, &b.location, &b.message))
    });
    out
}

// ── Id uniqueness ────────────────────────────────────────────────────────

fn check_duplicate_ids(schema: &Schema, out: &mut Vec<Diagnostic>) {
    let mut counts: BTreeMap<&Id, usize> = BTreeMap::new();
    let all = schema
        .spheres
        .iter()
        .map(|s| &s.id)
        .chain(schema.machines.iter().map(|m| &m.id))
        .chain(schema.flows.iter().map(|f| &f.id))
        .chain(schema.triggers.iter().map(|t| &t.id));
    for id in all {
        *counts.entry(id).or_insert(0) += 1;
    }
    for (id, count) in counts {
        if count > 1 {
            out.push(Diagnostic::new(
                DiagnosticCode::DuplicateId,
                id,
                format!("id `{id}` is declared {count} times; ids share one namespace"),
            ));
        }
    }
}

// ── Spheres ──────────────────────────────────────────────────────────────

fn check_spheres(schema: &Schema, out: &mut Vec<Diagnostic>) {
    let sphere_ids: BTreeSet<&Id> = schema.spheres.iter().map(|s| &s.id).collect();

    for sphere in &schema.spheres {
        if let Some(parent) = &sphere.parent {
            if !sphere_ids.contains(parent) {
                out.push(Diagnostic::new(
                    DiagnosticCode::Reference,
                    &sphere.id,
                    format!("parent `{parent}` is not a declared sphere"),
                ));
            }
        }
    }

    // Parent chains must reach a root. Walk each chain once, marking the
    // least id of every distinct cycle encountered.
    let parent_of: BTreeMap<&Id, &Id> = schema
        .spheres
        .iter()
        .filter_map(|s| {
            let p = s.parent.as_ref()?;
            sphere_ids.contains(p).then_some((&s.id, p))
        })
        .collect();
    let mut state: BTreeMap<&Id, u8> = BTreeMap::new(); // 1 = in progress, 2 = done
    let mut cycles: BTreeSet<&Id> = BTreeSet::new();
    for sphere in &schema.spheres {
        let mut path = Vec::new();
        let mut cur = &sphere.id;
        loop {
            match state.get(cur).copied() {
                Some(2) => break,
                Some(_) => {
                    // Found a cycle: everything from `cur` onward in `path`.
                    let start = path.iter().position(|id| *id == cur).unwrap();
                    cycles.insert(path[start..].iter().copied().min().unwrap());
                    break;
                }
                None => {}
            }
            state.insert(cur, 1);
            path.push(cur);
            match parent_of.get(cur) {
                Some(next) => cur = next,
                None => break,
            }
        }
        for id in path {
            state.insert(id, 2);
        }
    }
    for id in cycles {
        out.push(Diagnostic::new(
            DiagnosticCode::SphereCycle,
            id,
            format!("sphere `{id}` is contained in its own ancestry"),
        ));
    }
}

// ── Machines ─────────────────────────────────────────────────────────────

fn check_machines(schema: &Schema, out: &mut Vec<Diagnostic>) {
    let sphere_ids: BTreeSet<&Id> = schema.spheres.iter().map(|s| &s.id).collect();
    for machine in &schema.machines {
        if !sphere_ids.contains(&machine.sphere) {
            out.push(Diagnostic::new(
                DiagnosticCode::Reference,
                &machine.id,
                format!("sphere `{}` is not declared", machine.sphere),
            ));
        }
        if machine.stages.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticCode::Reference,
                &machine.id,
                "machine declares no stages",
            ));
        }
    }
}

// ── Flows and triggers ───────────────────────────────────────────────────

fn endpoint_problem(schema: &Schema, endpoint: &Endpoint, side: &str) -> Option<String> {
    match schema.machine(&endpoint.machine) {
        None => Some(format!(
            "{side} machine `{}` is not declared",
            endpoint.machine
        )),
        Some(m) if !m.stages.contains(&endpoint.stage) => Some(format!(
            "{side} stage {} is not declared on machine `{}`",
            endpoint.stage, endpoint.machine
        )),
        Some(_) => None,
    }
}

fn check_flows(schema: &Schema, out: &mut Vec<Diagnostic>) {
    for flow in &schema.flows {
        let mut broken = false;
        for (endpoint, side) in [(&flow.from, "source"), (&flow.to, "target")] {
            if let Some(message) = endpoint_problem(schema, endpoint, side) {
                out.push(Diagnostic::new(DiagnosticCode::Reference, &flow.id, message));
                broken = true;
            }
        }
        if broken {
            continue;
        }
        let same_machine = flow.from.machine == flow.to.machine;
        if adjacency_allowed(flow.from.stage, flow.to.stage, same_machine) {
            continue;
        }
        if same_machine {
            out.push(Diagnostic::new(
                DiagnosticCode::Adjacency,
                &flow.id,
                format!(
                    "{} -> {} is not a legal step within machine `{}`",
                    flow.from.stage, flow.to.stage, flow.from.machine
                ),
            ));
        } else {
            out.push(Diagnostic::new(
                DiagnosticCode::Transfer,
                &flow.id,
                format!(
                    "flows between machines connect Transfer to Transfer, not {} -> {}",
                    flow.from.stage, flow.to.stage
                ),
            ));
        }
    }
}

fn check_triggers(schema: &Schema, out: &mut Vec<Diagnostic>) {
    for trigger in &schema.triggers {
        let mut broken = false;
        for (endpoint, side) in [(&trigger.from, "source"), (&trigger.to, "target")] {
            if let Some(message) = endpoint_problem(schema, endpoint, side) {
                out.push(Diagnostic::new(
                    DiagnosticCode::Reference,
                    &trigger.id,
                    message,
                ));
                broken = true;
            }
        }
        if !broken && trigger.from == trigger.to {
            out.push(Diagnostic::new(
                DiagnosticCode::Reference,
                &trigger.id,
                "trigger endpoints must differ",
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{Flow, Machine, Sphere, Trigger};

    fn id(s: &str) -> Id {
        Id::new(s).unwrap()
    }

    fn ep(m: &str, stage: StageKind) -> Endpoint {
        Endpoint::new(id(m), stage)
    }

    /// "I put the book on the table": two spheres, the book released and
    /// transferred out of one and into the other.
    fn put_schema() -> Schema {
        Schema {
            spheres: vec![
                Sphere {
                    id: id("i"),
                    label: "I".into(),
                    parent: None,
                },
                Sphere {
                    id: id("table"),
                    label: "table".into(),
                    parent: None,
                },
            ],
            machines: vec![
                Machine {
                    id: id("book_i"),
                    thing: "book".into(),
                    sphere: id("i"),
                    stages: [StageKind::Release, StageKind::Transfer].into(),
                },
                Machine {
                    id: id("book_t"),
                    thing: "book".into(),
                    sphere: id("table"),
                    stages: [StageKind::Transfer, StageKind::Receive].into(),
                },
            ],
            flows: vec![
                Flow {
                    id: id("f1"),
                    from: ep("book_i", StageKind::Release),
                    to: ep("book_i", StageKind::Transfer),
                },
                Flow {
                    id: id("f2"),
                    from: ep("book_i", StageKind::Transfer),
                    to: ep("book_t", StageKind::Transfer),
                },
                Flow {
                    id: id("f3"),
                    from: ep("book_t", StageKind::Transfer),
                    to: ep("book_t", StageKind::Receive),
                },
            ],
            triggers: vec![],
        }
    }

    #[test]
    fn adjacency_table_is_exact() {
        use StageKind::*;
        let mut allowed = BTreeSet::new();
        for from in crate::stage::ALL_STAGES {
            for to in crate::stage::ALL_STAGES {
                if adjacency_allowed(from, to, true) {
                    allowed.insert((from, to));
                }
            }
        }
        let expected: BTreeSet<(StageKind, StageKind)> = [
            (Transfer, Receive),
            (Receive, Process),
            (Receive, Release),
            (Process, Release),
            (Create, Process),
            (Create, Release),
            (Release, Transfer),
        ]
        .into();
        assert_eq!(allowed, expected);

        assert!(adjacency_allowed(Transfer, Transfer, false));
        assert!(!adjacency_allowed(Transfer, Transfer, true));
        assert!(!adjacency_allowed(Release, Transfer, false));
        assert!(!adjacency_allowed(Create, Receive, true));
    }

    #[test]
    fn put_schema_is_clean() {
        assert_eq!(validate(&put_schema()), vec![]);
    }

    #[test]
    fn illegal_intra_machine_step_is_e_adj() {
        let mut schema = put_schema();
        schema.machines[1].stages.insert(StageKind::Process);
        schema.flows.push(Flow {
            id: id("f4"),
            from: ep("book_t", StageKind::Transfer),
            to: ep("book_t", StageKind::Process),
        });
        let diags = validate(&schema);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::Adjacency);
        assert_eq!(diags[0].location, id("f4"));
    }

    #[test]
    fn inter_machine_flow_must_be_transfer_to_transfer() {
        let mut schema = put_schema();
        schema.flows[1].from.stage = StageKind::Release;
        let diags = validate(&schema);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::Transfer);
        assert_eq!(diags[0].location, id("f2"));
    }

    #[test]
    fn unknown_references_are_e_ref() {
        let mut schema = put_schema();
        schema.flows[0].to.machine = id("ghost");
        schema.machines[0].sphere = id("nowhere");
        let diags = validate(&schema);
        let found: Vec<(&str, &str)> = diags
            .iter()
            .map(|d| (d.code.as_str(), d.location.as_str()))
            .collect();
        assert_eq!(found, [("E_REF", "book_i"), ("E_REF", "f1")]);
    }

    #[test]
    fn undeclared_stage_on_endpoint_is_e_ref() {
        let mut schema = put_schema();
        schema.flows[0].from.stage = StageKind::Create;
        let diags = validate(&schema);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::Reference);
        assert!(diags[0].message.contains("Create"));
    }

    #[test]
    fn empty_stage_set_is_reported() {
        let mut schema = put_schema();
        schema.machines[0].stages.clear();
        let diags = validate(&schema);
        // The machine itself plus both flows touching its now-undeclared stages.
        assert!(diags.iter().any(|d| d.location == id("book_i")
            && d.code == DiagnosticCode::Reference
            && d.message.contains("no stages")));
    }

    #[test]
    fn sphere_cycle_is_reported_once_at_least_id() {
        let mut schema = put_schema();
        schema.spheres[0].parent = Some(id("table"));
        schema.spheres[1].parent = Some(id("i"));
        let diags = validate(&schema);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::SphereCycle);
        assert_eq!(diags[0].location, id("i"));
    }

    #[test]
    fn self_parenting_sphere_is_a_cycle() {
        let mut schema = put_schema();
        schema.spheres[1].parent = Some(id("table"));
        let diags = validate(&schema);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::SphereCycle);
        assert_eq!(diags[0].location, id("table"));
    }

    #[test]
    fn duplicate_ids_across_kinds_are_reported() {
        let mut schema = put_schema();
        schema.triggers.push(Trigger {
            id: id("book_i"),
            from: ep("book_i", StageKind::Release),
            to: ep("book_t", StageKind::Receive),
        });
        let diags = validate(&schema);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::DuplicateId);
        assert_eq!(diags[0].location, id("book_i"));
    }

    #[test]
    fn degenerate_trigger_is_e_ref() {
        let mut schema = put_schema();
        schema.triggers.push(Trigger {
            id: id("t1"),
            from: ep("book_i", StageKind::Release),
            to: ep("book_i", StageKind::Release),
        });
        let diags = validate(&schema);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::Reference);
        assert_eq!(diags[0].location, id("t1"));
    }

    #[test]
    fn diagnostics_sort_by_code_then_location() {
        let mut schema = put_schema();
        schema.flows[1].from.stage = StageKind::Release; // E_XFER at f2
        schema.machines[0].sphere = id("nowhere"); // E_REF at book_i
        schema.spheres[0].parent = Some(id("table")); // cycle needs both…
        schema.spheres[1].parent = Some(id("i")); // …E_SPHERE_CYCLE at i
        let diags = validate(&schema);
        let keys: Vec<(&str, &str)> = diags
            .iter()
            .map(|d| (d.code.as_str(), d.location.as_str()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), 3);
    }

    #[test]
    fn diagnostic_display_is_tab_separated() {
        let diag = Diagnostic::new(DiagnosticCode::Adjacency, &id("f4"), "bad step");
        assert_eq!(diag.to_string(), "E_ADJ\tf4\tbad step");
    }
}
