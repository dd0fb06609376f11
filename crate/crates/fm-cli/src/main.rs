//! The `fm` command: validate, render, instantiate, eventize, simulate,
//! and reformat flow-machine models.
//!
//! Results go to standard output exactly as the libraries serialize them;
//! diagnostics go to standard error as `CODE<TAB>location<TAB>message`
//! lines. Exit codes: 0 clean, 1 diagnostics, 2 usage, 3 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fm_core::{Id, Schema};
use fm_dsl::DslError;
use fm_events::{
    build_from_specs, simulate, EventError, EventGraph, EventSpec, EventsFile, Region,
};
use fm_render::{render_chronology, render_events, render_schema, Rankdir, RenderOptions};
use verb_lexicon::{apply_tense, classify_vendler, Lexicon, RoleBinding, Tense, VerbError};

const EXIT_DIAGNOSTICS: u8 = 1;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "fm", version, about = "Flow-machine schemas, events, and verb models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a schema file and report diagnostics.
    Validate { file: PathBuf },
    /// Draw a schema (or its chronology) as DOT.
    Render {
        file: PathBuf,
        /// Events file supplying regions and temporal structure.
        #[arg(long)]
        events_file: Option<PathBuf>,
        /// Event ids to draw as boundary overlays.
        #[arg(long, value_delimiter = ',', requires = "events_file")]
        events: Vec<String>,
        /// Draw the event chronology instead of the schema.
        #[arg(long, requires = "events_file", conflicts_with = "events")]
        chronology: bool,
        /// Write DOT here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Append ids to sphere and machine labels.
        #[arg(long)]
        show_ids: bool,
        #[arg(long, value_enum, default_value_t = RankdirArg::Tb)]
        rankdir: RankdirArg,
    },
    /// Build the schema for a verb, optionally tensed and classified.
    Verb {
        verb: String,
        /// Role labels as role=label pairs.
        #[arg(long, num_args = 1.., value_name = "ROLE=LABEL")]
        roles: Vec<String>,
        /// Recast the whole schema as an event structure for a tense.
        #[arg(long, value_parser = parse_tense)]
        tense: Option<Tense>,
        /// Also print the aspectual category of the event structure.
        #[arg(long, requires = "tense")]
        classify: bool,
        /// Verb table to use instead of the bundled one (or FM_LEXICON).
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Resolve an events file against a schema and reprint it checked.
    Eventize { schema: PathBuf, events: PathBuf },
    /// Run a chronology into a trace.
    Simulate {
        schema: PathBuf,
        events: PathBuf,
        /// Occurrence cap for repeated events.
        #[arg(long, default_value_t = 3)]
        rep_bound: u32,
    },
    /// Reprint a schema in canonical form.
    Fmt {
        file: PathBuf,
        /// Emit the JSON form instead of schema text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RankdirArg {
    /// Top to bottom.
    Tb,
    /// Left to right.
    Lr,
}

fn parse_tense(s: &str) -> Result<Tense, String> {
    Tense::from_name(s)
        .or_else(|| {
            let folded: String = s
                .chars()
                .filter(|c| *c != '-' && *c != '_')
                .collect::<String>()
                .to_lowercase();
            verb_lexicon::ALL_TENSES
                .iter()
                .copied()
                .find(|t| t.name().replace('-', "") == folded)
        })
        .ok_or_else(|| {
            format!(
                "unknown tense; expected one of {}",
                verb_lexicon::ALL_TENSES.map(|t| t.name()).join(", ")
            )
        })
}

/// A failure that already knows its exit code; the message lines are
/// preformatted CODE<TAB>location<TAB>message diagnostics.
struct Failure {
    code: u8,
    lines: Vec<String>,
}

impl Failure {
    fn io(context: &Path, err: std::io::Error) -> Failure {
        Failure {
            code: EXIT_IO,
            lines: vec![format!("E_IO\t{}\t{err}", context.display())],
        }
    }

    fn diagnostic(code: &str, message: impl std::fmt::Display) -> Failure {
        Failure {
            code: EXIT_DIAGNOSTICS,
            lines: vec![format!("{code}\t-\t{message}")],
        }
    }
}

/// Strips the `CODE: ` prefix an error Display carries, leaving the bare
/// message for tab-separated output.
fn bare_message(code: &str, err: impl std::fmt::Display) -> String {
    let text = err.to_string();
    text.strip_prefix(&format!("{code}: "))
        .map(str::to_string)
        .unwrap_or(text)
}

impl From<EventError> for Failure {
    fn from(err: EventError) -> Failure {
        let code = err.code();
        Failure::diagnostic(code, bare_message(code, err))
    }
}

impl From<VerbError> for Failure {
    fn from(err: VerbError) -> Failure {
        let code = err.code();
        Failure::diagnostic(code, bare_message(code, err))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            for line in &failure.lines {
                eprintln!("{line}");
            }
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Render {
            file,
            events_file,
            events,
            chronology,
            output,
            show_ids,
            rankdir,
        } => cmd_render(&file, events_file.as_deref(), &events, chronology, output.as_deref(), show_ids, rankdir),
        Command::Verb {
            verb,
            roles,
            tense,
            classify,
            lexicon,
        } => cmd_verb(&verb, &roles, tense, classify, lexicon.as_deref()),
        Command::Eventize { schema, events } => cmd_eventize(&schema, &events),
        Command::Simulate {
            schema,
            events,
            rep_bound,
        } => cmd_simulate(&schema, &events, rep_bound),
        Command::Fmt { file, json } => cmd_fmt(&file, json),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Loads a schema from `.fm` text or `.json`, reporting parse problems as
/// diagnostics. The schema is not validated here.
fn load_schema(path: &Path) -> Result<Schema, Failure> {
    let text = read_file(path)?;
    if path.extension().is_some_and(|ext| ext == "json") {
        fm_dsl::from_json(&text).map_err(|err| match &err {
            DslError::Json(_) => Failure::diagnostic("E_JSON", bare_message("E_JSON", &err)),
            DslError::Version(_) => {
                Failure::diagnostic("E_VERSION", bare_message("E_VERSION", &err))
            }
            DslError::Invalid(invalid) => Failure {
                code: EXIT_DIAGNOSTICS,
                lines: invalid.diagnostics.iter().map(|d| d.to_string()).collect(),
            },
        })
    } else {
        fm_dsl::parse(&text).map_err(|errors| Failure {
            code: EXIT_DIAGNOSTICS,
            lines: errors
                .iter()
                .map(|e| {
                    format!(
                        "E_PARSE\t{}\texpected {}, found {}",
                        e.span, e.expected, e.found
                    )
                })
                .collect(),
        })
    }
}

/// Loads a schema and insists it is diagnostic-free.
fn load_valid_schema(path: &Path) -> Result<Schema, Failure> {
    let schema = load_schema(path)?;
    let diagnostics = fm_core::validate(&schema);
    if diagnostics.is_empty() {
        Ok(schema)
    } else {
        Err(Failure {
            code: EXIT_DIAGNOSTICS,
            lines: diagnostics.iter().map(|d| d.to_string()).collect(),
        })
    }
}

fn load_events(schema: &Schema, path: &Path) -> Result<EventGraph, Failure> {
    let text = read_file(path)?;
    let file: EventsFile = serde_json::from_str(&text)
        .map_err(|e| Failure::diagnostic("E_JSON", format!("{}: {e}", path.display())))?;
    Ok(build_from_specs(schema, &file)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_validate(file: &Path) -> Result<(), Failure> {
    load_valid_schema(file).map(|_| ())
}

fn cmd_render(
    file: &Path,
    events_file: Option<&Path>,
    events: &[String],
    chronology: bool,
    output: Option<&Path>,
    show_ids: bool,
    rankdir: RankdirArg,
) -> Result<(), Failure> {
    let schema = load_valid_schema(file)?;
    let opts = RenderOptions {
        show_ids,
        overlay_events: parse_ids(events)?,
        rankdir: match rankdir {
            RankdirArg::Tb => Rankdir::TopBottom,
            RankdirArg::Lr => Rankdir::LeftRight,
        },
    };
    let dot = if chronology {
        let graph = load_events(&schema, events_file.expect("clap requires events_file"))?;
        render_chronology(&graph)
    } else if let Some(path) = events_file {
        let graph = load_events(&schema, path)?;
        render_events(&schema, &graph.events, &opts).map_err(render_failure)?
    } else {
        render_schema(&schema, &opts).map_err(render_failure)?
    };
    emit(output, &dot)
}

fn render_failure(err: fm_render::RenderError) -> Failure {
    match &err {
        fm_render::RenderError::Invalid(invalid) => Failure {
            code: EXIT_DIAGNOSTICS,
            lines: invalid.diagnostics.iter().map(|d| d.to_string()).collect(),
        },
        fm_render::RenderError::Region(_) => {
            Failure::diagnostic("E_REGION", bare_message("E_REGION", &err))
        }
    }
}

fn parse_ids(raw: &[String]) -> Result<Vec<Id>, Failure> {
    raw.iter()
        .map(|s| {
            Id::new(s).map_err(|e| Failure::diagnostic("E_REGION", format!("event id {s:?}: {e}")))
        })
        .collect()
}

fn load_lexicon(flag: Option<&Path>) -> Result<Lexicon, Failure> {
    let path = flag
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("FM_LEXICON").map(PathBuf::from));
    match path {
        Some(path) => {
            let text = read_file(&path)?;
            Ok(Lexicon::from_verbs_tsv(&text)?)
        }
        None => Ok(Lexicon::bundled()),
    }
}

fn parse_roles(raw: &[String]) -> Result<RoleBinding, Failure> {
    let mut binding = RoleBinding::new();
    for pair in raw {
        let Some((role, label)) = pair.split_once('=') else {
            return Err(Failure::diagnostic(
                "E_BINDING",
                format!("role {pair:?} is not of the form role=label"),
            ));
        };
        if binding.insert(role.to_string(), label.to_string()).is_some() {
            return Err(Failure::diagnostic(
                "E_BINDING",
                format!("role `{role}` bound twice"),
            ));
        }
    }
    Ok(binding)
}

fn events_file_of(graph: &EventGraph) -> EventsFile {
    EventsFile {
        events: graph
            .events
            .iter()
            .map(|e| EventSpec {
                id: e.id.clone(),
                region: e.region.clone(),
                time: e.time.clone(),
                event_stages: Some(e.event_stages.clone()),
                repetition: e.repetition,
            })
            .collect(),
        edges: graph.edges.iter().cloned().collect(),
        sub_event_of: graph.sub_event_of.clone(),
    }
}

fn events_json(graph: &EventGraph) -> String {
    let mut text = serde_json::to_string(&events_file_of(graph)).expect("events serialize");
    text.push('\n');
    text
}

fn cmd_verb(
    verb: &str,
    roles: &[String],
    tense: Option<Tense>,
    classify: bool,
    lexicon_flag: Option<&Path>,
) -> Result<(), Failure> {
    let lexicon = load_lexicon(lexicon_flag)?;
    let entry = lexicon.lookup(verb)?;
    let mut binding = parse_roles(roles)?;
    if binding.is_empty() && entry.class.is_none() {
        binding.insert("agent".into(), "I".into());
    }
    let schema = lexicon.instantiate_verb(verb, &binding)?;

    let Some(tense) = tense else {
        let text = fm_dsl::print(&schema)
            .map_err(|e| Failure::diagnostic("E_INVALID", bare_message("E_INVALID", e)))?;
        return emit(None, &text);
    };

    let region = Region::whole_schema(&schema);
    let agent = Id::new("agent").expect("template sphere id");
    let model = apply_tense(&schema, &region, &agent, tense)?;
    let mut out = fm_dsl::print(&model.schema)
        .map_err(|e| Failure::diagnostic("E_INVALID", bare_message("E_INVALID", e)))?;
    out.push_str(&events_json(&model.graph));
    if classify {
        match classify_vendler(&model.graph, &model.schema) {
            Some(category) => out.push_str(&format!("{category}\n")),
            None => out.push_str("E_UNCLASSIFIED\n"),
        }
    }
    emit(None, &out)
}

fn cmd_eventize(schema_path: &Path, events_path: &Path) -> Result<(), Failure> {
    let schema = load_valid_schema(schema_path)?;
    let graph = load_events(&schema, events_path)?;
    emit(None, &events_json(&graph))
}

fn cmd_simulate(schema_path: &Path, events_path: &Path, rep_bound: u32) -> Result<(), Failure> {
    let schema = load_valid_schema(schema_path)?;
    let graph = load_events(&schema, events_path)?;
    let trace = simulate(&graph, &schema, rep_bound)?;
    emit(None, &trace.to_text())
}

fn cmd_fmt(file: &Path, json: bool) -> Result<(), Failure> {
    let schema = load_schema(file)?;
    let text = if json {
        let mut text = fm_dsl::to_json(&schema).map_err(print_failure)?;
        text.push('\n');
        text
    } else {
        fm_dsl::print(&schema).map_err(print_failure)?
    };
    emit(None, &text)
}

fn print_failure(err: DslError) -> Failure {
    match &err {
        DslError::Invalid(invalid) => Failure {
            code: EXIT_DIAGNOSTICS,
            lines: invalid.diagnostics.iter().map(|d| d.to_string()).collect(),
        },
        DslError::Json(_) => Failure::diagnostic("E_JSON", bare_message("E_JSON", &err)),
        DslError::Version(_) => Failure::diagnostic("E_VERSION", bare_message("E_VERSION", &err)),
    }
}
