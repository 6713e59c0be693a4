//! The `semreg` command line. Every data-producing command goes through
//! [`semreg_core::api`], so `--format json` prints exactly what the HTTP
//! server answers for the same request.
//!
//! Exit codes: 0 success, 1 violations found, 2 usage or parse error,
//! 3 internal error.

mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use semreg_core::api::{
    self, ApiError, CompatibilityRequest, DraftRequest, ErrorCode, QueryRequest, SolutionRequest,
    StatusRequest,
};
use semreg_core::codegen::{generate_manifest, generate_skeleton};
use semreg_core::reasoner::Reasoner;
use semreg_core::registry::{
    load_ontology_files, ComponentKind, ComponentRecord, SearchFilters, Status, Store,
};
use semreg_core::skill::{flatten, SkillGraph};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATIONS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

const ONTOLOGY_SUFFIX: &str = "rdsl";

#[derive(Debug, Parser)]
#[command(
    name = "semreg",
    version,
    about = "Semantic component registry: ontologies, discovery, compatibility, skills and skeletons",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Output format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and classify ontology files.
    #[command(subcommand)]
    Ontology(OntologyCommand),
    /// Find components whose description is subsumed by an expression.
    Query(QueryArgs),
    /// Work with component records.
    #[command(subcommand)]
    Component(ComponentCommand),
    /// Validate, flatten and parameterize skills.
    #[command(subcommand)]
    Skill(SkillCommand),
    /// Check the requirements of one stored component against another.
    Compat(CompatArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
enum OntologyCommand {
    /// Parse, check and classify; fails if a concept is unsatisfiable.
    Check {
        /// Ontology files, or directories of `.rdsl` files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print every derived subsumption.
    Classify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Filters {
    #[arg(long, value_parser = parse_status)]
    status: Option<Status>,
    #[arg(long, value_parser = parse_kind)]
    kind: Option<ComponentKind>,
    /// Some supported device is made by this manufacturer.
    #[arg(long)]
    manufacturer: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Substring of id, description, author or owner.
    #[arg(long)]
    text: Option<String>,
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[arg(long)]
    limit: Option<usize>,
}

impl Filters {
    fn request(self, expression: Option<String>) -> QueryRequest {
        QueryRequest {
            expression,
            filters: SearchFilters {
                status: self.status,
                kind: self.kind,
                manufacturer: self.manufacturer,
                model: self.model,
                text: self.text,
            },
            offset: self.offset,
            limit: self.limit,
        }
    }
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Ontology files, or directories of `.rdsl` files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Concept expression; omitted lists every component.
    #[arg(long)]
    expr: Option<String>,
    /// Store directory; without one the query runs over an empty store.
    #[arg(long, env = "SEMREG_STORE")]
    store: Option<PathBuf>,
    #[command(flatten)]
    filters: Filters,
}

#[derive(Debug, Args)]
struct Env {
    /// Ontology files, or directories of `.rdsl` files.
    #[arg(short = 'O', long = "ontology", required = true, num_args = 1..)]
    ontology: Vec<PathBuf>,
    /// Store directory.
    #[arg(long, env = "SEMREG_STORE")]
    store: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ComponentCommand {
    /// Validate a record file and add it to the store.
    Add {
        file: PathBuf,
        #[command(flatten)]
        env: Env,
    },
    /// Validate a record file against the ontologies.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        env: Env,
    },
    /// Print a stored record.
    Show {
        id: String,
        #[command(flatten)]
        env: Env,
    },
    /// Move a stored record one step along Model, Prototype, Released.
    Status {
        id: String,
        #[arg(value_parser = parse_status)]
        status: Status,
        #[command(flatten)]
        env: Env,
    },
    /// Draft a record carrying everything the given software types entail.
    Draft {
        #[arg(required = true)]
        types: Vec<String>,
        #[command(flatten)]
        env: Env,
    },
    /// Interface skeleton of a record file or stored id.
    Skeleton {
        target: String,
        #[command(flatten)]
        env: Env,
    },
    /// Package manifest of a record file or stored id.
    Manifest {
        target: String,
        #[command(flatten)]
        env: Env,
    },
}

#[derive(Debug, Subcommand)]
enum SkillCommand {
    /// Validate a skill file (graph or Skill record) or stored skill.
    Validate {
        target: String,
        #[command(flatten)]
        env: Env,
    },
    /// Inline nested skills.
    Flatten {
        target: String,
        #[command(flatten)]
        env: Env,
    },
    /// Flatten, bind parameters and pin record versions.
    Solution {
        target: String,
        /// `instance.key=value`; the value is JSON or else a string.
        #[arg(long = "param", value_name = "INSTANCE.KEY=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        env: Env,
    },
}

#[derive(Debug, Args)]
struct CompatArgs {
    /// The component whose requirements are checked.
    requirer: String,
    provider: String,
    #[command(flatten)]
    env: Env,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: String,
    #[command(flatten)]
    env: Env,
}

fn parse_status(s: &str) -> Result<Status, String> {
    Status::parse(s).ok_or_else(|| format!("expected Model, Prototype or Released, got `{s}`"))
}

fn parse_kind(s: &str) -> Result<ComponentKind, String> {
    ComponentKind::parse(s).ok_or_else(|| format!("expected HAComponent, SWComponent or Skill, got `{s}`"))
}

/// A failed command: what to print and which code to exit with.
#[derive(Debug)]
struct Failure {
    exit: u8,
    error: ApiError,
}

impl From<ApiError> for Failure {
    fn from(error: ApiError) -> Self {
        Failure {
            exit: error.code.exit_code(),
            error,
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        exit: EXIT_USAGE,
        error: ApiError::new(ErrorCode::BadRequest, message),
    }
}

fn internal(message: impl Into<String>) -> Failure {
    Failure {
        exit: EXIT_INTERNAL,
        error: ApiError::new(ErrorCode::Internal, message),
    }
}

type Outcome = Result<u8, Failure>;

struct Output<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn emit<T: Serialize>(&mut self, value: &T, table: impl FnOnce(&T) -> String) -> Result<(), Failure> {
        let text = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(value).map_err(|e| internal(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Table => table(value),
        };
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| internal(e.to_string()))
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let format = cli.format;
    match execute(cli, &mut Output { format, out }, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = match format {
                Format::Json => writeln!(
                    err,
                    "{}",
                    serde_json::to_string_pretty(&f.error).unwrap_or_default()
                ),
                Format::Table => writeln!(err, "{}", render::error(&f.error)),
            };
            f.exit
        }
    }
}

fn execute(cli: Cli, out: &mut Output<'_>, err: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Ontology(OntologyCommand::Check { files }) => {
            let summary = api::ontology_summary(&load_ontology(&files)?);
            out.emit(&summary, render::summary)?;
            Ok(if summary.unsatisfiable.is_empty() { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::Ontology(OntologyCommand::Classify { files }) => {
            out.emit(&api::classification(&load_ontology(&files)?), render::classification)?;
            Ok(EXIT_OK)
        }
        Command::Query(args) => {
            let ontology = load_ontology(&args.files)?;
            let store = open_store(ontology, args.store.as_deref())?;
            let page = api::query(&store.snapshot(), &args.filters.request(args.expr))?;
            for w in &page.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            out.emit(&page, render::page)?;
            Ok(EXIT_OK)
        }
        Command::Component(c) => component(c, out),
        Command::Skill(c) => skill(c, out),
        Command::Compat(args) => {
            let store = args.env.store_required()?;
            let report = api::compatibility(
                &store.snapshot(),
                &CompatibilityRequest {
                    requirer: args.requirer,
                    provider: args.provider,
                },
            )?;
            out.emit(&report, render::compatibility)?;
            Ok(if report.compatible { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::Serve(args) => serve(args, err),
    }
}

fn component(command: ComponentCommand, out: &mut Output<'_>) -> Outcome {
    match command {
        ComponentCommand::Add { file, env } => {
            let store = env.store_required()?;
            let created = api::add_component(&store, read_record(&file)?)?;
            out.emit(&created, |c| format!("added {}\n", c.id))?;
        }
        ComponentCommand::Validate { file, env } => {
            let ontology = env.ontology()?;
            let result = api::validate_component(&ontology, &read_record(&file)?);
            out.emit(&result, render::record_validation)?;
            if !result.valid {
                return Ok(EXIT_VIOLATIONS);
            }
        }
        ComponentCommand::Show { id, env } => {
            let store = env.store_required()?;
            out.emit(&api::get_component(&store.snapshot(), &id)?, render::pretty)?;
        }
        ComponentCommand::Status { id, status, env } => {
            let store = env.store_required()?;
            let record = api::set_status(&store, &id, StatusRequest { status })?;
            out.emit(&record, |r| format!("{}: {}\n", r.id, r.meta.status))?;
        }
        ComponentCommand::Draft { types, env } => {
            let ontology = env.ontology()?;
            out.emit(&api::draft(&ontology, &DraftRequest { types })?, render::pretty)?;
        }
        ComponentCommand::Skeleton { target, env } => {
            let skeleton = match as_file(&target) {
                Some(path) => generate_skeleton(&read_record(path)?),
                None => api::skeleton(&env.store_required()?.snapshot(), &target)?,
            };
            out.emit(&skeleton, render::skeleton)?;
        }
        ComponentCommand::Manifest { target, env } => {
            let xml = match as_file(&target) {
                Some(path) => generate_manifest(&read_record(path)?),
                None => api::manifest(&env.store_required()?.snapshot(), &target)?,
            };
            out.emit(&xml, |x| x.clone())?;
        }
    }
    Ok(EXIT_OK)
}

fn skill(command: SkillCommand, out: &mut Output<'_>) -> Outcome {
    match command {
        SkillCommand::Validate { target, env } => {
            let store = env.store_required()?;
            let snapshot = store.snapshot();
            let graph = skill_target(&snapshot, &target)?;
            let report = api::validate_skill(&snapshot, &graph)?;
            out.emit(&report, render::skill_report)?;
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        SkillCommand::Flatten { target, env } => {
            let store = env.store_required()?;
            let snapshot = store.snapshot();
            let flat = match as_file(&target) {
                Some(_) => flatten(&skill_target(&snapshot, &target)?, &*snapshot).map_err(ApiError::from)?,
                None => api::flatten_skill(&snapshot, &target)?,
            };
            out.emit(&flat, render::pretty)?;
            Ok(EXIT_OK)
        }
        SkillCommand::Solution { target, params, env } => {
            let store = env.store_required()?;
            let snapshot = store.snapshot();
            let parameters = parse_params(&params)?;
            let request = match as_file(&target) {
                Some(_) => SolutionRequest {
                    skill: Some(skill_target(&snapshot, &target)?),
                    id: None,
                    parameters,
                },
                None => SolutionRequest {
                    skill: None,
                    id: Some(target),
                    parameters,
                },
            };
            out.emit(&api::solution(&snapshot, &request)?, render::pretty)?;
            Ok(EXIT_OK)
        }
    }
}

fn serve(args: ServeArgs, err: &mut dyn Write) -> Outcome {
    let store = Arc::new(args.env.store_required()?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| internal(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.bind)
            .await
            .map_err(|e| internal(format!("cannot bind {}: {e}", args.bind)))?;
        let addr = listener.local_addr().map_err(|e| internal(e.to_string()))?;
        let _ = writeln!(err, "listening on http://{addr}");
        let _ = err.flush();
        semreg_server::serve(store, listener)
            .await
            .map_err(|e| internal(e.to_string()))
    })?;
    Ok(EXIT_OK)
}

impl Env {
    fn ontology(&self) -> Result<Reasoner, Failure> {
        load_ontology(&self.ontology)
    }

    fn store_required(&self) -> Result<Store, Failure> {
        let dir = self
            .store
            .as_deref()
            .ok_or_else(|| usage("no store given: pass --store or set SEMREG_STORE"))?;
        open_store(self.ontology()?, Some(dir))
    }
}

/// Files as given; directories contribute their `.rdsl` files in name order.
fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == ONTOLOGY_SUFFIX))
                .collect();
            found.sort();
            files.extend(found);
        } else if p.is_file() {
            files.push(p.clone());
        } else {
            return Err(usage(format!("{}: no such file or directory", p.display())));
        }
    }
    Ok(files)
}

fn load_ontology(paths: &[PathBuf]) -> Result<Reasoner, Failure> {
    let files = expand(paths)?;
    if files.is_empty() {
        return Err(usage("no ontology files given"));
    }
    Ok(load_ontology_files(&files).map_err(ApiError::from)?)
}

fn open_store(ontology: Reasoner, dir: Option<&Path>) -> Result<Store, Failure> {
    match dir {
        Some(d) => Ok(Store::open(d, ontology).map_err(ApiError::from)?),
        None => Ok(Store::in_memory(ontology)),
    }
}

fn as_file(target: &str) -> Option<&Path> {
    let p = Path::new(target);
    p.is_file().then_some(p)
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e))
}

fn parse_error(path: &Path, e: serde_json::Error) -> Failure {
    ApiError::new(ErrorCode::ParseError, format!("{}: {e}", path.display())).into()
}

fn read_record(path: &Path) -> Result<ComponentRecord, Failure> {
    serde_json::from_value(read_json(path)?).map_err(|e| parse_error(path, e))
}

/// A skill graph from a file holding a graph or a Skill record, or the
/// body of a stored Skill record.
fn skill_target(snapshot: &semreg_core::registry::Snapshot, target: &str) -> Result<SkillGraph, Failure> {
    let Some(path) = as_file(target) else {
        let record = api::get_component(snapshot, target)?;
        return record
            .skill_body
            .clone()
            .ok_or_else(|| usage(format!("`{target}` is not a skill")));
    };
    let value = read_json(path)?;
    if value.get("skillBody").is_some() {
        let record: ComponentRecord = serde_json::from_value(value).map_err(|e| parse_error(path, e))?;
        return Ok(record.skill_body.unwrap_or_default());
    }
    serde_json::from_value(value).map_err(|e| parse_error(path, e))
}

type Parameters = BTreeMap<String, BTreeMap<String, serde_json::Value>>;

fn parse_params(params: &[String]) -> Result<Parameters, Failure> {
    let mut out = Parameters::new();
    for p in params {
        let bad = || usage(format!("parameter `{p}` is not INSTANCE.KEY=VALUE"));
        let (target, value) = p.split_once('=').ok_or_else(bad)?;
        let (instance, key) = target.split_once('.').ok_or_else(bad)?;
        if instance.is_empty() || key.is_empty() {
            return Err(bad());
        }
        let value = serde_json::from_str(value).unwrap_or_else(|_| serde_json::Value::String(value.into()));
        out.entry(instance.to_string()).or_default().insert(key.to_string(), value);
    }
    Ok(out)
}
