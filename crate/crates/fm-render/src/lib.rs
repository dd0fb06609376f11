//! DOT output for schemas, event overlays, and chronology graphs.
//!
//! Spheres become nested clusters, machines become clusters of stage
//! nodes, flows are solid edges, triggers dashed. Layout is left to the
//! DOT consumer; this crate only promises structure and determinism.

use std::fmt::Write as _;

use fm_core::{validate, Endpoint, InvalidSchema, Schema, Sphere};
use fm_events::{Event, EventGraph, Repetition};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("E_INVALID: {0}")]
    Invalid(#[from] InvalidSchema),
    /// An overlay names an unknown event or a region off the schema.
    #[error("E_REGION: {0}")]
    Region(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rankdir {
    #[default]
    TopBottom,
    LeftRight,
}

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    /// Append machine and sphere ids to their labels.
    pub show_ids: bool,
    /// Events to draw as bold boundary clusters, by id.
    pub overlay_events: Vec<fm_core::Id>,
    pub rankdir: Rankdir,
}

/// Text inside a DOT double-quoted string.
fn dot_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn node_name(endpoint: &Endpoint) -> String {
    format!("{}__{}", endpoint.machine, endpoint.stage)
}

pub fn render_schema(schema: &Schema, opts: &RenderOptions) -> Result<String, RenderError> {
    let diagnostics = validate(schema);
    if !diagnostics.is_empty() {
        return Err(RenderError::Invalid(InvalidSchema { diagnostics }));
    }
    let mut out = String::from("digraph fm {\n");
    if opts.rankdir == Rankdir::LeftRight {
        out.push_str("  rankdir=LR;\n");
    }
    for sphere in schema.root_spheres() {
        write_sphere(schema, sphere, opts, 1, &mut out);
    }
    write_connections(schema, &mut out);
    out.push_str("}\n");
    Ok(out)
}

fn write_sphere(schema: &Schema, sphere: &Sphere, opts: &RenderOptions, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let label = if opts.show_ids {
        format!("{} ({})", sphere.label, sphere.id)
    } else {
        sphere.label.clone()
    };
    let _ = writeln!(out, "{pad}subgraph cluster_s_{} {{", sphere.id);
    let _ = writeln!(out, "{pad}  label=\"{}\";", dot_escape(&label));
    for machine in schema.machines_in(&sphere.id) {
        let label = if opts.show_ids {
            format!("{} ({})", machine.thing, machine.id)
        } else {
            machine.thing.clone()
        };
        let _ = writeln!(out, "{pad}  subgraph cluster_m_{} {{", machine.id);
        let _ = writeln!(out, "{pad}    label=\"{}\";", dot_escape(&label));
        for stage in &machine.stages {
            let _ = writeln!(out, "{pad}    {}__{stage} [label=\"{stage}\"];", machine.id);
        }
        let _ = writeln!(out, "{pad}  }}");
    }
    for child in schema.children_of(&sphere.id) {
        write_sphere(schema, child, opts, depth + 1, out);
    }
    let _ = writeln!(out, "{pad}}}");
}

fn write_connections(schema: &Schema, out: &mut String) {
    let mut flows: Vec<_> = schema.flows.iter().collect();
    flows.sort_by(|a, b| a.id.cmp(&b.id));
    for flow in flows {
        let _ = writeln!(out, "  {} -> {};", node_name(&flow.from), node_name(&flow.to));
    }
    let mut triggers: Vec<_> = schema.triggers.iter().collect();
    triggers.sort_by(|a, b| a.id.cmp(&b.id));
    for trigger in triggers {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed];",
            node_name(&trigger.from),
            node_name(&trigger.to)
        );
    }
}

/// Schema rendering with the requested events drawn on top as bold
/// boundary clusters listing their member stage nodes.
pub fn render_events(
    schema: &Schema,
    events: &[Event],
    opts: &RenderOptions,
) -> Result<String, RenderError> {
    let mut out = render_schema(schema, opts)?;
    if opts.overlay_events.is_empty() {
        return Ok(out);
    }
    out.truncate(out.len() - "}\n".len());
    for id in &opts.overlay_events {
        let event = events.iter().find(|e| &e.id == id).ok_or_else(|| {
            RenderError::Region(format!("overlay names unknown event `{id}`"))
        })?;
        let _ = writeln!(out, "  subgraph cluster_ev_{id} {{");
        let _ = writeln!(out, "    label=\"{}\";", dot_escape(id.as_ref()));
        let _ = writeln!(out, "    style=bold;");
        for endpoint in &event.region.stages {
            if !schema.has_endpoint(endpoint) {
                return Err(RenderError::Region(format!(
                    "event `{id}` covers stage {} on `{}`, which the schema does not declare",
                    endpoint.stage, endpoint.machine
                )));
            }
            let _ = writeln!(out, "    {};", node_name(endpoint));
        }
        let _ = writeln!(out, "  }}");
    }
    out.push_str("}\n");
    Ok(out)
}

/// The before/after structure of a chronology: one node per event (with a
/// repeat marker where the event recurs), solid edges for temporal order,
/// dotted edges from sub-events to the events they decompose.
pub fn render_chronology(graph: &EventGraph) -> String {
    let mut out = String::from("digraph chronology {\n");
    for event in &graph.events {
        let label = match event.repetition {
            None => event.id.to_string(),
            Some(Repetition::Count(n)) => format!("{} (repeats {n})", event.id),
            Some(Repetition::UnboundedOngoing) => format!("{} (repeats *)", event.id),
        };
        let _ = writeln!(out, "  {} [label=\"{}\"];", event.id, dot_escape(&label));
    }
    for (from, to) in &graph.edges {
        let _ = writeln!(out, "  {from} -> {to};");
    }
    for (child, parent) in &graph.sub_event_of {
        let _ = writeln!(out, "  {child} -> {parent} [style=dotted];");
    }
    out.push_str("}\n");
    out
}
