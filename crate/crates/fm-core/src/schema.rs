use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::id::Id;
use crate::stage::StageKind;
use crate::validate::{validate, InvalidSchema};

/// A named scope in the schema. Spheres nest to form a forest; the root
/// spheres are the top-level actors and places of the model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sphere {
    pub id: Id,
    pub label: String,
    pub parent: Option<Id>,
}

/// A machine moves one thing through a subset of the five stages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Machine {
    pub id: Id,
    /// Label of the thing this machine handles.
    pub thing: String,
    /// The sphere the machine sits in.
    pub sphere: Id,
    pub stages: BTreeSet<StageKind>,
}

/// One end of a flow or trigger: a stage on a specific machine.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub machine: Id,
    pub stage: StageKind,
}

impl Endpoint {
    pub fn new(machine: Id, stage: StageKind) -> Endpoint {
        Endpoint { machine, stage }
    }
}

/// A solid arrow: the thing itself moves from one stage to another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    pub id: Id,
    pub from: Endpoint,
    pub to: Endpoint,
}

/// A dashed arrow: reaching `from` activates `to`. Triggers are exempt
/// from the stage-adjacency rules that constrain flows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trigger {
    pub id: Id,
    pub from: Endpoint,
    pub to: Endpoint,
}

/// A complete static model. Construction performs no checks; run
/// [`validate`] to obtain diagnostics and [`Schema::canonicalize`] to get
/// the order-normalized form used by printing and comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub spheres: Vec<Sphere>,
    pub machines: Vec<Machine>,
    pub flows: Vec<Flow>,
    pub triggers: Vec<Trigger>,
}

impl Schema {
    pub fn new() -> Schema {
        Schema::default()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
            && self.machines.is_empty()
            && self.flows.is_empty()
            && self.triggers.is_empty()
    }

    pub fn sphere(&self, id: &Id) -> Option<&Sphere> {
        self.spheres.iter().find(|s| &s.id == id)
    }

    pub fn machine(&self, id: &Id) -> Option<&Machine> {
        self.machines.iter().find(|m| &m.id == id)
    }

    pub fn flow(&self, id: &Id) -> Option<&Flow> {
        self.flows.iter().find(|f| &f.id == id)
    }

    pub fn trigger(&self, id: &Id) -> Option<&Trigger> {
        self.triggers.iter().find(|t| &t.id == id)
    }

    /// Top-level spheres, sorted by id.
    pub fn root_spheres(&self) -> Vec<&Sphere> {
        let mut roots: Vec<&Sphere> = self.spheres.iter().filter(|s| s.parent.is_none()).collect();
        roots.sort_by(|a, b| a.id.cmp(&b.id));
        roots
    }

    /// Direct child spheres of `id`, sorted by id.
    pub fn children_of(&self, id: &Id) -> Vec<&Sphere> {
        let mut children: Vec<&Sphere> = self
            .spheres
            .iter()
            .filter(|s| s.parent.as_ref() == Some(id))
            .collect();
        children.sort_by(|a, b| a.id.cmp(&b.id));
        children
    }

    /// Machines sitting directly in sphere `id`, sorted by id.
    pub fn machines_in(&self, id: &Id) -> Vec<&Machine> {
        let mut machines: Vec<&Machine> =
            self.machines.iter().filter(|m| &m.sphere == id).collect();
        machines.sort_by(|a, b| a.id.cmp(&b.id));
        machines
    }

    /// Does `endpoint` name a declared stage on a declared machine?
    pub fn has_endpoint(&self, endpoint: &Endpoint) -> bool {
        self.machine(&endpoint.machine)
            .is_some_and(|m| m.stages.contains(&endpoint.stage))
    }

    /// Reorders every element list into the canonical form: two schemas
    /// declaring the same elements in any order canonicalize to equal
    /// values. Spheres follow a depth-first walk of the nesting tree with
    /// siblings in id order and machines grouped under their sphere, which
    /// is exactly the order a reparse of the printed text produces; flows
    /// and triggers sort flat by id. Idempotent. Fails if the schema has
    /// diagnostics.
    pub fn canonicalize(mut self) -> Result<Schema, InvalidSchema> {
        let diagnostics = validate(&self);
        if !diagnostics.is_empty() {
            return Err(InvalidSchema { diagnostics });
        }
        let mut rank = std::collections::BTreeMap::new();
        let mut stack: Vec<Id> = self
            .root_spheres()
            .iter()
            .rev()
            .map(|s| s.id.clone())
            .collect();
        while let Some(id) = stack.pop() {
            rank.insert(id.clone(), rank.len());
            for child in self.children_of(&id).iter().rev() {
                stack.push(child.id.clone());
            }
        }
        // A clean validate means every sphere and machine home is ranked.
        self.spheres.sort_by_key(|s| rank[&s.id]);
        self.machines
            .sort_by(|a, b| rank[&a.sphere].cmp(&rank[&b.sphere]).then(a.id.cmp(&b.id)));
        self.flows.sort_by(|a, b| a.id.cmp(&b.id));
        self.triggers.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(self)
    }
}
