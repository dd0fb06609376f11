//! Checks the simulator's temporal order against a brute-force oracle
//! that enumerates every linear extension of the edge relation and keeps
//! the lexicographically least one.

use std::collections::{BTreeMap, BTreeSet};

use fm_core::{Endpoint, Id, Machine, Schema, Sphere, StageKind};
use fm_events::{build_chronology, eventize, simulate, Region, TimeMachine};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn id(s: &str) -> Id {
    Id::new(s).unwrap()
}

fn tiny_schema() -> Schema {
    Schema {
        spheres: vec![Sphere {
            id: id("s"),
            label: "S".into(),
            parent: None,
        }],
        machines: vec![Machine {
            id: id("m"),
            thing: "x".into(),
            sphere: id("s"),
            stages: [StageKind::Process].into(),
        }],
        flows: vec![],
        triggers: vec![],
    }
}

/// Every linear extension, by exhaustive backtracking. Candidates are
/// tried in reverse order so the least extension is found by comparison,
/// not by construction.
fn least_extension(ids: &[Id], edges: &BTreeSet<(Id, Id)>) -> Vec<Id> {
    fn recurse(
        ids: &[Id],
        preds: &BTreeMap<&Id, Vec<&Id>>,
        placed: &mut Vec<Id>,
        used: &mut Vec<bool>,
        best: &mut Option<Vec<Id>>,
    ) {
        if placed.len() == ids.len() {
            if best.as_ref().is_none_or(|b| placed.as_slice() < b.as_slice()) {
                *best = Some(placed.clone());
            }
            return;
        }
        for i in (0..ids.len()).rev() {
            if used[i] {
                continue;
            }
            let ready = preds
                .get(&ids[i])
                .is_none_or(|ps| ps.iter().all(|p| placed.contains(p)));
            if !ready {
                continue;
            }
            used[i] = true;
            placed.push(ids[i].clone());
            recurse(ids, preds, placed, used, best);
            placed.pop();
            used[i] = false;
        }
    }

    let mut preds: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (from, to) in edges {
        preds.entry(to).or_default().push(from);
    }
    let mut best = None;
    recurse(
        ids,
        &preds,
        &mut Vec::new(),
        &mut vec![false; ids.len()],
        &mut best,
    );
    best.expect("a DAG always has a linear extension")
}

fn order_of(schema: &Schema, ids: &[Id], edges: &BTreeSet<(Id, Id)>) -> Vec<Id> {
    let region = Region::new([Endpoint::new(id("m"), StageKind::Process)], []);
    let events = ids
        .iter()
        .map(|eid| {
            eventize(schema, eid.clone(), region.clone(), TimeMachine::past(), None).unwrap()
        })
        .collect();
    let graph = build_chronology(events, edges.clone(), BTreeMap::new()).unwrap();
    simulate(&graph, schema, 1).unwrap().temporal_order
}

#[test]
fn branches_interleave_in_id_order() {
    let schema = tiny_schema();
    let ids = [id("e1"), id("e2"), id("e3")];
    let edges = [(id("e1"), id("e3")), (id("e2"), id("e3"))].into();
    assert_eq!(order_of(&schema, &ids, &edges), vec![id("e1"), id("e2"), id("e3")]);
}

#[test]
fn edges_outweigh_id_order() {
    let schema = tiny_schema();
    let ids = [id("a"), id("b"), id("c")];
    let edges = [(id("c"), id("a"))].into();
    assert_eq!(order_of(&schema, &ids, &edges), vec![id("b"), id("c"), id("a")]);
}

#[test]
fn matches_brute_force_oracle_on_random_dags() {
    let schema = tiny_schema();
    let names = ["a", "b", "c", "d", "e", "f", "g", "h"];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..520 {
        let n = rng.random_range(2..=8);
        let mut ids: Vec<Id> = names[..n].iter().map(|s| id(s)).collect();
        // A random permutation orients the edges, so the DAG is valid by
        // construction but its edge directions are unrelated to id order.
        ids.shuffle(&mut rng);
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_bool(0.35) {
                    edges.insert((ids[i].clone(), ids[j].clone()));
                }
            }
        }
        ids.sort();

        let got = order_of(&schema, &ids, &edges);
        let want = least_extension(&ids, &edges);
        assert_eq!(got, want, "case {case}: edges {edges:?}");

        let position: BTreeMap<&Id, usize> =
            got.iter().enumerate().map(|(i, e)| (e, i)).collect();
        for (from, to) in &edges {
            assert!(position[from] < position[to], "case {case} broke {from} -> {to}");
        }
    }
}
