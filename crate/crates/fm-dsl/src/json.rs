//! JSON interchange. The document is the schema's element lists plus a
//! `schema_version` field (currently `"1"`). Keys are emitted in sorted
//! order so output is byte-stable.

use fm_core::{validate, Flow, InvalidSchema, Machine, Schema, Sphere, Trigger};
use serde::{Deserialize, Serialize};

use crate::DslError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize, Deserialize)]
struct SchemaDoc {
    schema_version: String,
    spheres: Vec<Sphere>,
    machines: Vec<Machine>,
    flows: Vec<Flow>,
    triggers: Vec<Trigger>,
}

/// Serializes a valid schema to compact JSON with sorted keys.
pub fn to_json(schema: &Schema) -> Result<String, DslError> {
    let diagnostics = validate(schema);
    if !diagnostics.is_empty() {
        return Err(DslError::Invalid(InvalidSchema { diagnostics }));
    }
    let doc = SchemaDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        spheres: schema.spheres.clone(),
        machines: schema.machines.clone(),
        flows: schema.flows.clone(),
        triggers: schema.triggers.clone(),
    };
    // Routing through Value sorts object keys (serde_json maps are ordered).
    let value = serde_json::to_value(&doc).expect("schema serialization cannot fail");
    Ok(value.to_string())
}

/// Reads a schema from JSON text. The element lists are taken as-is; run
/// `fm_core::validate` afterwards to check them.
pub fn from_json(text: &str) -> Result<Schema, DslError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| DslError::Json(e.to_string()))?;
    match value.get("schema_version") {
        Some(serde_json::Value::String(v)) if v == SCHEMA_VERSION => {}
        Some(serde_json::Value::String(v)) => return Err(DslError::Version(v.clone())),
        _ => return Err(DslError::Version("<missing>".to_string())),
    }
    let doc: SchemaDoc =
        serde_json::from_value(value).map_err(|e| DslError::Json(e.to_string()))?;
    Ok(Schema {
        spheres: doc.spheres,
        machines: doc.machines,
        flows: doc.flows,
        triggers: doc.triggers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn empty_schema_json_is_exact_and_sorted() {
        assert_eq!(
            to_json(&Schema::new()).unwrap(),
            r#"{"flows":[],"machines":[],"schema_version":"1","spheres":[],"triggers":[]}"#
        );
    }

    #[test]
    fn round_trips_a_schema() {
        let schema = parse(
            r#"
schema {
  sphere i "I" {
    machine m thing "thing \"quoted\"" stages [Create Process]
  }
  flow f1: m.Create -> m.Process ;
}
"#,
        )
        .unwrap()
        .canonicalize()
        .unwrap();
        let json = to_json(&schema).unwrap();
        assert_eq!(from_json(&json).unwrap(), schema);
    }

    #[test]
    fn malformed_json_is_e_json() {
        assert!(matches!(from_json("{"), Err(DslError::Json(_))));
        assert!(matches!(
            from_json(r#"{"schema_version":"1","spheres":7}"#),
            Err(DslError::Json(_))
        ));
        // Well-formed JSON with a malformed identifier is still E_JSON.
        assert!(matches!(
            from_json(
                r#"{"schema_version":"1","spheres":[{"id":"9bad","label":"","parent":null}],"machines":[],"flows":[],"triggers":[]}"#
            ),
            Err(DslError::Json(_))
        ));
    }

    #[test]
    fn wrong_version_is_e_version() {
        assert!(matches!(
            from_json(r#"{"schema_version":"2"}"#),
            Err(DslError::Version(v)) if v == "2"
        ));
        assert!(matches!(
            from_json(r#"{"spheres":[]}"#),
            Err(DslError::Version(_))
        ));
    }

    #[test]
    fn to_json_rejects_invalid_schema() {
        let schema = parse("schema { flow f: a.Create -> a.Create ; }").unwrap();
        assert!(matches!(to_json(&schema), Err(DslError::Invalid(_))));
    }
}
