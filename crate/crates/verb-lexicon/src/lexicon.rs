//! The verb table and its class templates.
//!
//! Both tables are tab-separated text with `#` comments; templates are
//! schema fragments whose `${role}` placeholders are filled textually
//! (with label escaping) before parsing. Everything ships bundled, and a
//! replacement verb table can be loaded from disk against the bundled
//! class shapes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use fm_core::{validate, Schema, StageKind};
use fm_dsl::escape_label;

use crate::vendler::VendlerCategory;
use crate::VerbError;

const BUNDLED_VERBS: &str = include_str!("../data/lexicon.tsv");
const BUNDLED_CLASSES: &str = include_str!("../data/classes.tsv");

const TEMPLATES: &[(&str, &str)] = &[
    ("activity.fm", include_str!("../data/templates/activity.fm")),
    ("advice.fm", include_str!("../data/templates/advice.fm")),
    ("advice_against.fm", include_str!("../data/templates/advice_against.fm")),
    ("advice_to.fm", include_str!("../data/templates/advice_to.fm")),
    (
        "change_of_possession.fm",
        include_str!("../data/templates/change_of_possession.fm"),
    ),
    ("concealment.fm", include_str!("../data/templates/concealment.fm")),
    ("exerting_force.fm", include_str!("../data/templates/exerting_force.fm")),
    ("holding.fm", include_str!("../data/templates/holding.fm")),
    ("learning.fm", include_str!("../data/templates/learning.fm")),
    ("putting.fm", include_str!("../data/templates/putting.fm")),
    ("removing.fm", include_str!("../data/templates/removing.fm")),
    ("sending.fm", include_str!("../data/templates/sending.fm")),
];

/// The dynamic/stative sub-kind of a verb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynamicStative {
    Activity,
    Process,
    Sensation,
    Momentary,
    Cognition,
    Perception,
    Relational,
}

impl DynamicStative {
    pub fn name(self) -> &'static str {
        match self {
            DynamicStative::Activity => "Activity",
            DynamicStative::Process => "Process",
            DynamicStative::Sensation => "Sensation",
            DynamicStative::Momentary => "Momentary",
            DynamicStative::Cognition => "Cognition",
            DynamicStative::Perception => "Perception",
            DynamicStative::Relational => "Relational",
        }
    }

    pub fn from_name(name: &str) -> Option<DynamicStative> {
        Some(match name {
            "Activity" => DynamicStative::Activity,
            "Process" => DynamicStative::Process,
            "Sensation" => DynamicStative::Sensation,
            "Momentary" => DynamicStative::Momentary,
            "Cognition" => DynamicStative::Cognition,
            "Perception" => DynamicStative::Perception,
            "Relational" => DynamicStative::Relational,
            _ => return None,
        })
    }

    /// Activity, Process, Sensation, and Momentary verbs are dynamic; the
    /// rest are stative.
    pub fn is_dynamic(self) -> bool {
        matches!(
            self,
            DynamicStative::Activity
                | DynamicStative::Process
                | DynamicStative::Sensation
                | DynamicStative::Momentary
        )
    }
}

impl fmt::Display for DynamicStative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One verb row: its class (None when the verb only has the generic
/// activity shape), its dynamic/stative sub-kind, and its default
/// aspectual category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexiconEntry {
    pub verb: String,
    pub class: Option<String>,
    pub dynamic_stative: DynamicStative,
    pub vendler_default: VendlerCategory,
}

/// One class row: role slots, the checked theme walk (when the variant
/// has one), and the template text.
#[derive(Clone, Debug)]
pub struct ClassDef {
    pub class: String,
    /// None is the default reading; variants carry the preposition or
    /// other cue that selects them.
    pub variant: Option<String>,
    pub roles: Vec<String>,
    pub signature: Option<Vec<StageKind>>,
    pub template_name: String,
    pub template: String,
    /// Modeled but marked as not well-formed English.
    pub ungrammatical: bool,
}

/// A role-to-label assignment for one instantiation.
pub type RoleBinding = BTreeMap<String, String>;

#[derive(Debug)]
pub struct Lexicon {
    verbs: BTreeMap<String, LexiconEntry>,
    classes: BTreeMap<(String, Option<String>), ClassDef>,
}

impl Lexicon {
    /// The tables compiled into the crate.
    pub fn bundled() -> Lexicon {
        Lexicon::from_verbs_tsv(BUNDLED_VERBS).expect("bundled lexicon data is well formed")
    }

    /// Bundled class shapes with a replacement verb table.
    pub fn from_verbs_tsv(verbs_tsv: &str) -> Result<Lexicon, VerbError> {
        let classes = parse_classes_tsv(BUNDLED_CLASSES)?;
        let verbs = parse_verbs_tsv(verbs_tsv)?;
        for entry in verbs.values() {
            if let Some(class) = &entry.class {
                if !classes.contains_key(&(class.clone(), None)) {
                    return Err(VerbError::Data(format!(
                        "verb `{}` names class `{class}`, which has no template",
                        entry.verb
                    )));
                }
            }
        }
        Ok(Lexicon { verbs, classes })
    }

    pub fn from_verbs_path(path: &Path) -> Result<Lexicon, VerbError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| VerbError::Data(format!("{}: {e}", path.display())))?;
        Lexicon::from_verbs_tsv(&text)
    }

    pub fn lookup(&self, verb: &str) -> Result<&LexiconEntry, VerbError> {
        self.verbs
            .get(verb)
            .ok_or_else(|| VerbError::UnknownVerb(verb.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.verbs.values()
    }

    /// All class names with templates, the generic activity shape aside.
    pub fn class_names(&self) -> Vec<&str> {
        self.classes
            .keys()
            .filter(|(class, variant)| class != "-" && variant.is_none())
            .map(|(class, _)| class.as_str())
            .collect()
    }

    pub fn class(&self, class: &str, variant: Option<&str>) -> Result<&ClassDef, VerbError> {
        self.classes
            .get(&(class.to_string(), variant.map(str::to_string)))
            .ok_or_else(|| match variant {
                None => VerbError::UnknownClass(class.to_string()),
                Some(v) => VerbError::UnknownClass(format!("{class} ({v})")),
            })
    }

    /// The stage walk the class template puts its theme through.
    pub fn signature(&self, class: &str) -> Result<&[StageKind], VerbError> {
        let def = self.class(class, None)?;
        def.signature
            .as_deref()
            .ok_or_else(|| VerbError::Data(format!("class `{class}` declares no signature")))
    }

    /// Builds the default template of a class with the given labels.
    pub fn instantiate(&self, class: &str, binding: &RoleBinding) -> Result<Schema, VerbError> {
        self.instantiate_def(self.class(class, None)?, binding, None)
    }

    /// Builds a named variant of a class.
    pub fn instantiate_variant(
        &self,
        class: &str,
        variant: &str,
        binding: &RoleBinding,
    ) -> Result<Schema, VerbError> {
        self.instantiate_def(self.class(class, Some(variant))?, binding, None)
    }

    /// Builds the schema for a verb: its class template when it has one,
    /// the generic activity shape otherwise.
    pub fn instantiate_verb(&self, verb: &str, binding: &RoleBinding) -> Result<Schema, VerbError> {
        let entry = self.lookup(verb)?;
        match &entry.class {
            Some(class) => self.instantiate(class, binding),
            None => self.instantiate_def(self.class("-", None)?, binding, Some(verb)),
        }
    }

    fn instantiate_def(
        &self,
        def: &ClassDef,
        binding: &RoleBinding,
        verb: Option<&str>,
    ) -> Result<Schema, VerbError> {
        let missing: Vec<&str> = def
            .roles
            .iter()
            .filter(|r| !binding.contains_key(*r))
            .map(String::as_str)
            .collect();
        let extra: Vec<&str> = binding
            .keys()
            .filter(|k| !def.roles.contains(k))
            .map(String::as_str)
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            let mut parts = Vec::new();
            if !missing.is_empty() {
                parts.push(format!("missing roles: {}", missing.join(", ")));
            }
            if !extra.is_empty() {
                parts.push(format!("unexpected roles: {}", extra.join(", ")));
            }
            return Err(VerbError::Binding(format!(
                "{} takes ({}); {}",
                def.class,
                def.roles.join(", "),
                parts.join("; ")
            )));
        }

        let mut map: BTreeMap<&str, String> = binding
            .iter()
            .map(|(role, label)| (role.as_str(), escape_label(label)))
            .collect();
        if let Some(verb) = verb {
            map.insert("verb", escape_label(verb));
        }
        let text = substitute(&def.template, &map)
            .map_err(|e| VerbError::Data(format!("template {}: {e}", def.template_name)))?;
        let schema = fm_dsl::parse(&text).map_err(|errs| {
            VerbError::Data(format!("template {}: {}", def.template_name, errs[0]))
        })?;
        let diagnostics = validate(&schema);
        if let Some(first) = diagnostics.first() {
            return Err(VerbError::Data(format!(
                "template {}: {first}",
                def.template_name
            )));
        }
        Ok(schema)
    }
}

/// Fills `${name}` placeholders in one pass, so substituted label text is
/// never rescanned for placeholders.
fn substitute(template: &str, map: &BTreeMap<&str, String>) -> Result<String, String> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(i) = rest.find("${") {
        out.push_str(&rest[..i]);
        let after = &rest[i + 2..];
        let Some(j) = after.find('}') else {
            return Err("unterminated ${ placeholder".into());
        };
        let name = &after[..j];
        match map.get(name) {
            Some(value) => out.push_str(value),
            None => return Err(format!("placeholder ${{{name}}} has no binding")),
        }
        rest = &after[j + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn data_rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn parse_verbs_tsv(text: &str) -> Result<BTreeMap<String, LexiconEntry>, VerbError> {
    let mut verbs = BTreeMap::new();
    for (lineno, line) in data_rows(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        let [verb, class, tag, vendler] = fields[..] else {
            return Err(VerbError::Data(format!(
                "verb table line {lineno}: expected 4 tab-separated fields"
            )));
        };
        let entry = LexiconEntry {
            verb: verb.to_string(),
            class: (class != "-").then(|| class.to_string()),
            dynamic_stative: DynamicStative::from_name(tag).ok_or_else(|| {
                VerbError::Data(format!("verb table line {lineno}: unknown kind `{tag}`"))
            })?,
            vendler_default: VendlerCategory::from_name(vendler).ok_or_else(|| {
                VerbError::Data(format!(
                    "verb table line {lineno}: unknown category `{vendler}`"
                ))
            })?,
        };
        if verbs.insert(verb.to_string(), entry).is_some() {
            return Err(VerbError::Data(format!(
                "verb table line {lineno}: duplicate verb `{verb}`"
            )));
        }
    }
    Ok(verbs)
}

fn parse_classes_tsv(
    text: &str,
) -> Result<BTreeMap<(String, Option<String>), ClassDef>, VerbError> {
    let templates: BTreeMap<&str, &str> = TEMPLATES.iter().copied().collect();
    let mut classes = BTreeMap::new();
    for (lineno, line) in data_rows(text) {
        let fields: Vec<&str> = line.split('\t').collect();
        let [class, variant, roles, signature, template_name, ungrammatical] = fields[..] else {
            return Err(VerbError::Data(format!(
                "class table line {lineno}: expected 6 tab-separated fields"
            )));
        };
        let signature = if signature == "-" {
            None
        } else {
            let stages = signature
                .split(',')
                .map(|name| {
                    StageKind::from_name(name).ok_or_else(|| {
                        VerbError::Data(format!(
                            "class table line {lineno}: unknown stage `{name}`"
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(stages)
        };
        let template = templates.get(template_name).ok_or_else(|| {
            VerbError::Data(format!(
                "class table line {lineno}: no bundled template `{template_name}`"
            ))
        })?;
        let ungrammatical = match ungrammatical {
            "true" => true,
            "false" => false,
            other => {
                return Err(VerbError::Data(format!(
                    "class table line {lineno}: expected true or false, got `{other}`"
                )))
            }
        };
        let def = ClassDef {
            class: class.to_string(),
            variant: (variant != "-").then(|| variant.to_string()),
            roles: roles.split(',').map(str::to_string).collect(),
            signature,
            template_name: template_name.to_string(),
            template: template.to_string(),
            ungrammatical,
        };
        let key = (def.class.clone(), def.variant.clone());
        if classes.insert(key, def).is_some() {
            return Err(VerbError::Data(format!(
                "class table line {lineno}: duplicate class row"
            )));
        }
    }
    Ok(classes)
}

/// The stages the schema's theme runs through: one full walk of the whole
/// schema, kept to machines whose thing is `theme`.
pub fn theme_walk(schema: &Schema, theme: &str) -> Result<Vec<StageKind>, VerbError> {
    use fm_events::{build_chronology, eventize, simulate, Region, TimeMachine};

    let region = Region::whole_schema(schema);
    let event = eventize(
        schema,
        fm_core::Id::new("sig").expect("fixed id"),
        region,
        TimeMachine::past(),
        None,
    )?;
    let graph = build_chronology(vec![event], BTreeSet::new(), BTreeMap::new())?;
    let trace = simulate(&graph, schema, 1)?;
    let theme_machines: BTreeSet<&fm_core::Id> = schema
        .machines
        .iter()
        .filter(|m| m.thing == theme)
        .map(|m| &m.id)
        .collect();
    Ok(trace
        .steps
        .iter()
        .filter(|s| theme_machines.contains(&s.endpoint.machine))
        .map(|s| s.endpoint.stage)
        .collect())
}
