//! Canonical pretty-printer. Output is deterministic: elements appear in id
//! order regardless of declaration order, indentation is two spaces, lines
//! end with LF, and labels are escaped so the result always reparses to the
//! same schema.

use fm_core::{validate, Endpoint, Schema, Sphere};

use crate::DslError;

/// Escapes a label for use inside a quoted literal. Backslash, quote, and
/// control characters are escaped; all other characters pass through.
pub fn escape_label(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{{{:x}}}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Prints a schema in canonical text form. Fails if the schema has
/// validation diagnostics. The printed form reparses to the canonical
/// value: `parse(print(s)) == canonicalize(s)`.
pub fn print(schema: &Schema) -> Result<String, DslError> {
    let diagnostics = validate(schema);
    if !diagnostics.is_empty() {
        return Err(DslError::Invalid(fm_core::InvalidSchema { diagnostics }));
    }
    if schema.is_empty() {
        return Ok("schema {}\n".to_string());
    }
    let mut out = String::from("schema {\n");
    for sphere in schema.root_spheres() {
        print_sphere(schema, sphere, 1, &mut out);
    }
    let mut flows: Vec<_> = schema.flows.iter().collect();
    flows.sort_by(|a, b| a.id.cmp(&b.id));
    for flow in flows {
        out.push_str(&format!(
            "  flow {}: {} -> {} ;\n",
            flow.id,
            endpoint(&flow.from),
            endpoint(&flow.to)
        ));
    }
    let mut triggers: Vec<_> = schema.triggers.iter().collect();
    triggers.sort_by(|a, b| a.id.cmp(&b.id));
    for trigger in triggers {
        out.push_str(&format!(
            "  trigger {}: {} ~> {} ;\n",
            trigger.id,
            endpoint(&trigger.from),
            endpoint(&trigger.to)
        ));
    }
    out.push_str("}\n");
    Ok(out)
}

fn endpoint(e: &Endpoint) -> String {
    format!("{}.{}", e.machine, e.stage)
}

fn print_sphere(schema: &Schema, sphere: &Sphere, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let machines = schema.machines_in(&sphere.id);
    let children = schema.children_of(&sphere.id);
    if machines.is_empty() && children.is_empty() {
        out.push_str(&format!(
            "{indent}sphere {} \"{}\" {{}}\n",
            sphere.id,
            escape_label(&sphere.label)
        ));
        return;
    }
    out.push_str(&format!(
        "{indent}sphere {} \"{}\" {{\n",
        sphere.id,
        escape_label(&sphere.label)
    ));
    for machine in machines {
        let stages: Vec<&str> = machine.stages.iter().map(|s| s.name()).collect();
        out.push_str(&format!(
            "{indent}  machine {} thing \"{}\" stages [{}]\n",
            machine.id,
            escape_label(&machine.thing),
            stages.join(" ")
        ));
    }
    for child in children {
        print_sphere(schema, child, depth + 1, out);
    }
    out.push_str(&format!("{indent}}}\n"));
}
