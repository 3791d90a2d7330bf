//! Command-line interface.
//!
//! Exit codes: 0 success, 1 I/O or corrupt store, 2 invalid input (usage,
//! JSON, validation, query syntax, unknown type), 3 conflict, 4 not found.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::Value;

use ssnforge_core::ontology::{Namespaces, SensorInstance, SensorType, DEFAULT_BASE_IRI};
use ssnforge_core::query::{evaluate, parse_query};
use ssnforge_core::rdf::{serialize_nquads, serialize_ntriples, serialize_turtle, Graph, Iri};
use ssnforge_core::registry::{Kind, Registry, RegistryEntry};

use crate::common::{entry_json, kind_graph, metadata_text, Failure, FailureClass};

#[derive(Debug, Parser)]
#[command(name = "ssnforge", version, about = "Sensor type and instance registry with SSN RDF output")]
pub struct Cli {
    /// Registry data directory.
    #[arg(long, global = true, env = "SSNFORGE_DATA_DIR", default_value = "./data")]
    pub data_dir: PathBuf,
    /// Base IRI for minted resources; must end with '/' or '#'.
    #[arg(long, global = true, env = "SSNFORGE_BASE_IRI", default_value = DEFAULT_BASE_IRI)]
    pub base_iri: String,
    /// Format for `show` and `list`.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Turtle)]
    pub output_format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Turtle,
    Ntriples,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Turtle,
    Nquads,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Manage sensor types.
    #[command(subcommand)]
    Type(TypeCommand),
    /// Manage sensor instances.
    #[command(subcommand)]
    Instance(InstanceCommand),
    /// Write the whole registry as Turtle (union graph) or N-Quads.
    Export {
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a query file and print the bindings as JSON.
    Query {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Write the X-GSN metadata file for an instance.
    Metadata {
        id: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, env = "SSNFORGE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "SSNFORGE_HOST", default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory of static files served at `/`.
        #[arg(long, env = "SSNFORGE_STATIC_DIR")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TypeCommand {
    /// Register a type from a JSON file ('-' for stdin).
    Add {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Replace an existing type definition.
    Update {
        #[arg(short, long)]
        file: PathBuf,
    },
    Show { id: String },
    List,
    Remove { id: String },
}

#[derive(Debug, Subcommand)]
pub enum InstanceCommand {
    /// Register an instance from a JSON file ('-' for stdin).
    Add {
        #[arg(short, long)]
        file: PathBuf,
    },
    Show { id: String },
    List,
    Remove { id: String },
}

pub fn exit_code(class: FailureClass) -> u8 {
    match class {
        FailureClass::Internal => 1,
        FailureClass::BadRequest | FailureClass::Unprocessable | FailureClass::UnsupportedMedia => 2,
        FailureClass::Conflict => 3,
        FailureClass::NotFound => 4,
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            for v in &f.details {
                let _ = writeln!(err, "  {v}");
            }
            exit_code(f.class)
        }
    }
}

fn io_failure(context: &str, e: io::Error) -> Failure {
    Failure::new(FailureClass::Internal, "IO_ERROR", format!("{context}: {e}"))
}

fn namespaces(base_iri: &str) -> Result<Namespaces, Failure> {
    let iri = Iri::new(base_iri).map_err(|e| {
        Failure::new(FailureClass::Unprocessable, "BAD_BASE_IRI", e.to_string())
    })?;
    Ok(Namespaces::new(iri)?)
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    let mut bytes = Vec::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_end(&mut bytes)
            .map_err(|e| io_failure("reading stdin", e))?;
    } else {
        bytes = fs::read(path).map_err(|e| io_failure(&path.display().to_string(), e))?;
    }
    Ok(bytes)
}

fn read_definition<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_slice(&read_input(path)?).map_err(|e| Failure::invalid_json(&e))
}

fn emit(out: &mut dyn Write, output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(&path.display().to_string(), e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| io_failure("writing output", e)),
    }
}

fn json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text
}

fn render_graph(format: OutputFormat, graph: &Graph) -> String {
    match format {
        OutputFormat::Turtle => serialize_turtle(graph),
        OutputFormat::Ntriples => serialize_ntriples(graph),
        OutputFormat::Json => unreachable!("JSON output is rendered from entries"),
    }
}

fn added(out: &mut dyn Write, entry: &RegistryEntry) -> Result<(), Failure> {
    let line = format!("{} {} {} triples\n", entry.id, entry.iri, entry.graph.len());
    emit(out, None, &line)
}

fn show(registry: &Registry, format: OutputFormat, kind: Kind, id: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let entry = registry.get(kind, id)?;
    let text = match format {
        OutputFormat::Json => json_text(&entry_json(&entry)),
        other => render_graph(other, &entry.graph),
    };
    emit(out, None, &text)
}

fn list(registry: &Registry, format: OutputFormat, kind: Kind, out: &mut dyn Write) -> Result<(), Failure> {
    let snap = registry.snapshot();
    let text = match format {
        OutputFormat::Json => json_text(&Value::Array(snap.list(kind).into_iter().map(entry_json).collect())),
        other => {
            let graph = kind_graph(&snap, kind, registry.namespaces());
            if graph.is_empty() {
                String::new()
            } else {
                render_graph(other, &graph)
            }
        }
    };
    emit(out, None, &text)
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let ns = namespaces(&cli.base_iri)?;
    let format = cli.output_format;
    if let Command::Serve { port, host, static_dir } = cli.command {
        return serve(cli.data_dir, ns, SocketAddr::new(host, port), static_dir, err);
    }
    let registry = Registry::open(&cli.data_dir, ns)?;
    match cli.command {
        Command::Type(cmd) => match cmd {
            TypeCommand::Add { file } => {
                let t: SensorType = read_definition(&file)?;
                added(out, &registry.register_type(t)?)
            }
            TypeCommand::Update { file } => {
                let t: SensorType = read_definition(&file)?;
                added(out, &registry.update_type(t)?)
            }
            TypeCommand::Show { id } => show(&registry, format, Kind::Type, &id, out),
            TypeCommand::List => list(&registry, format, Kind::Type, out),
            TypeCommand::Remove { id } => {
                registry.remove(Kind::Type, &id)?;
                let _ = writeln!(err, "removed type {id}");
                Ok(())
            }
        },
        Command::Instance(cmd) => match cmd {
            InstanceCommand::Add { file } => {
                let i: SensorInstance = read_definition(&file)?;
                added(out, &registry.register_instance(i)?)
            }
            InstanceCommand::Show { id } => show(&registry, format, Kind::Instance, &id, out),
            InstanceCommand::List => list(&registry, format, Kind::Instance, out),
            InstanceCommand::Remove { id } => {
                registry.remove(Kind::Instance, &id)?;
                let _ = writeln!(err, "removed instance {id}");
                Ok(())
            }
        },
        Command::Export { format, output } => {
            let snap = registry.snapshot();
            let text = match format {
                ExportFormat::Nquads => serialize_nquads(snap.dataset()),
                ExportFormat::Turtle if snap.dataset().is_empty() => String::new(),
                ExportFormat::Turtle => {
                    let mut graph = registry.namespaces().empty_graph();
                    graph.extend_from(&snap.dataset().union_graph());
                    serialize_turtle(&graph)
                }
            };
            emit(out, output.as_deref(), &text)
        }
        Command::Query { file } => {
            let bytes = read_input(&file)?;
            let text = String::from_utf8(bytes).map_err(|e| {
                Failure::new(FailureClass::BadRequest, "SYNTAX_ERROR", e.to_string())
            })?;
            let query = parse_query(&text)?;
            let bindings = evaluate(&query, registry.snapshot().dataset());
            let value = serde_json::to_value(&bindings).expect("bindings serialize");
            emit(out, None, &json_text(&value))
        }
        Command::Metadata { id, output } => {
            let text = metadata_text(&registry.snapshot(), &id, registry.namespaces())?;
            emit(out, output.as_deref(), &text)
        }
        Command::Serve { .. } => unreachable!("handled above"),
    }
}

fn serve(
    data_dir: PathBuf,
    ns: Namespaces,
    addr: SocketAddr,
    static_dir: Option<PathBuf>,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let registry = Arc::new(Registry::open(&data_dir, ns)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| io_failure("starting runtime", e))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| io_failure(&format!("binding {addr}"), e))?;
        let local = listener
            .local_addr()
            .map_err(|e| io_failure("reading bound address", e))?;
        let _ = writeln!(err, "listening on http://{local}");
        let _ = err.flush();
        crate::api::serve(listener, registry, static_dir)
            .await
            .map_err(|e| io_failure("serving", e))
    })
}
