//! `monodromy`: command-line front end for the monodromy-core library.

mod commands;
mod config;
mod svg;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use monodromy_core::io::to_json;
use monodromy_core::Error;
use serde::Serialize;

use commands::Artifact;
use config::{Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "monodromy", version, about = "Framed monodromy and cluster coordinates of rational potentials")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Input JSON: a file path, inline JSON, or `-` for stdin.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the primary artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Decay target for subdominant seeding.
    #[arg(long, global = true)]
    seed_decay: Option<f64>,
    /// Move budget of the good-triangulation search.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write the diagnostic SVG to this path (analyze only).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    emit_config: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pole table of a potential.
    Analyze,
    /// Marked bordered surface of a potential and its rank.
    Surface,
    /// Standard triangulation of a catalog surface.
    Triangulate,
    /// Flip an arc of an ideal triangulation.
    Flip {
        #[arg(long)]
        arc: usize,
    },
    /// Flip an arc of a tagged triangulation.
    TaggedFlip {
        #[arg(long)]
        arc: usize,
    },
    /// Exchange matrix of an ideal triangulation.
    ExchangeMatrix,
    /// Fock-Goncharov coordinates of a framed system.
    Coords,
    /// Coordinates of a framed system on a signed triangulation.
    SignedCoords,
    /// Framed system with prescribed coordinates.
    Reconstruct,
    /// Cluster mutation at an arc.
    Mutate {
        #[arg(long)]
        arc: usize,
    },
    /// Degeneracy verdict of a framed system.
    Degeneracy,
    /// Search for a tagged triangulation with all coordinates regular.
    FindGood,
    /// Framed monodromy system and its coordinates.
    Monodromy,
    /// Coordinates of φ/ħ² over a list of ħ values.
    WkbSweep {
        #[arg(long, value_delimiter = ',', required = true)]
        hbar: Vec<f64>,
        /// Arcs to track; all arcs when omitted.
        #[arg(long, value_delimiter = ',')]
        arc: Vec<usize>,
    },
    /// Quick acceptance checks, pass/fail per criterion.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Surface => "surface",
            Command::Triangulate => "triangulate",
            Command::Flip { .. } => "flip",
            Command::TaggedFlip { .. } => "tagged-flip",
            Command::ExchangeMatrix => "exchange-matrix",
            Command::Coords => "coords",
            Command::SignedCoords => "signed-coords",
            Command::Reconstruct => "reconstruct",
            Command::Mutate { .. } => "mutate",
            Command::Degeneracy => "degeneracy",
            Command::FindGood => "find-good",
            Command::Monodromy => "monodromy",
            Command::WkbSweep { .. } => "wkb-sweep",
            Command::Selftest => "selftest",
        }
    }
}

enum Failure {
    Core(Error),
    Selftest(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Core(Error::Invalid(msg.into()))
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    config: &'a RunConfig,
    result: &'a serde_json::Value,
}

fn read_input(raw: &Option<String>) -> Result<String, Failure> {
    let raw = raw.as_deref().ok_or_else(|| invalid("this command needs --input"))?;
    let trimmed = raw.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(raw.to_string());
    }
    if raw == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| invalid(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(raw).map_err(|e| invalid(format!("cannot read input {raw}: {e}")))
}

fn execute(cli: &Cli, command: &Command, cfg: &RunConfig) -> Result<Artifact, Failure> {
    let text = || read_input(&cli.input);
    let a = match command {
        Command::Analyze => commands::analyze(&commands::parse(&text()?)?)?,
        Command::Surface => commands::surface(&commands::parse(&text()?)?)?,
        Command::Triangulate => commands::triangulate(&commands::parse(&text()?)?)?,
        Command::Flip { arc } => commands::flip(&commands::parse(&text()?)?, *arc)?,
        Command::TaggedFlip { arc } => commands::tagged_flip(&commands::parse(&text()?)?, *arc)?,
        Command::ExchangeMatrix => commands::exchange_matrix(&commands::parse(&text()?)?)?,
        Command::Coords => commands::coords(&commands::parse(&text()?)?)?,
        Command::SignedCoords => commands::signed_coords(&commands::parse(&text()?)?)?,
        Command::Reconstruct => commands::reconstruct_cmd(&commands::parse(&text()?)?)?,
        Command::Mutate { arc } => commands::mutate_cmd(&commands::parse(&text()?)?, *arc)?,
        Command::Degeneracy => commands::degeneracy_cmd(&commands::parse(&text()?)?)?,
        Command::FindGood => commands::find_good(&commands::parse(&text()?)?, cfg)?,
        Command::Monodromy => commands::monodromy(&commands::parse(&text()?)?, cfg)?,
        Command::WkbSweep { hbar, arc } => commands::wkb(&commands::parse(&text()?)?, hbar, arc, cfg)?,
        Command::Selftest => {
            let (a, passed) = commands::selftest();
            if !passed {
                let body = to_json(&Envelope { command: "selftest", config: cfg, result: &a.json });
                return Err(Failure::Selftest(body));
            }
            a
        }
    };
    Ok(a)
}

fn render(cli: &Cli, command: &Command, cfg: &RunConfig, a: &Artifact) -> Result<String, Failure> {
    let unavailable = |f: &str| invalid(format!("{f} output is not available for {}", command.name()));
    match cli.format {
        Format::Json => Ok(to_json(&Envelope { command: command.name(), config: cfg, result: &a.json }) + "\n"),
        Format::Csv => a.csv.clone().ok_or_else(|| unavailable("csv")),
        Format::Svg => a.svg.clone().ok_or_else(|| unavailable("svg")),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let overrides = Overrides { rel_tol: cli.rel_tol, seed_decay: cli.seed_decay, budget: cli.budget };
    let cfg = RunConfig::load(cli.config.as_deref())?.apply(&overrides)?;
    if cli.emit_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let command = cli.command.as_ref().ok_or_else(|| invalid("no command given"))?;
    if cli.svg.is_some() && !matches!(command, Command::Analyze) {
        return Err(invalid("--svg is only available for analyze"));
    }
    let artifact = execute(cli, command, &cfg)?;
    let body = render(cli, command, &cfg, &artifact)?;
    if let (Some(path), Some(svg)) = (&cli.svg, &artifact.svg) {
        std::fs::write(path, svg).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    match &cli.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?
        }
        None => {
            std::io::stdout().write_all(body.as_bytes()).map_err(|e| invalid(format!("cannot write stdout: {e}")))?
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    kind: &'a str,
    message: String,
    detail: String,
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).target(env_logger::Target::Stderr).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let report = ErrorReport { kind: "validation", message: e.kind().to_string(), detail: e.to_string() };
            eprintln!("{}", to_json(&serde_json::json!({ "error": report })));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Selftest(body)) => {
            println!("{body}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            let kind = if e.is_numerical() { "numerical" } else { "validation" };
            let report = ErrorReport { kind, message: e.to_string(), detail: format!("{e:?}") };
            eprintln!("{}", to_json(&serde_json::json!({ "error": report })));
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
