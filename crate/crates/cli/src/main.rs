mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "pachlab", version, about = "Overlap and Pach-type experiments on the join complex")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for every randomized step; required by randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Artifact path; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall-clock times, which makes artifacts non-reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
    /// JSON object of flag values, overridden by flags given on the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the chain-complex identities and cohomology of the join.
    ChainsVerify(commands::ChainsVerify),
    /// Minimal cofilling of a coboundary.
    Cofill(commands::Cofill),
    /// Maximum covered families over random fillings of the sphere.
    SphereExp(commands::SphereExp),
    /// Search for a coloring whose monochromatic cliques are rare.
    ColorSearch(commands::ColorSearch),
    /// Fraction of clique-free edge subsets of a small join.
    CliqueProb(commands::CliqueProb),
    /// Union bounds, thresholds and the overlap constant.
    Bounds(commands::Bounds),
    /// Write a PL map file.
    BuildMap(commands::BuildMap),
    /// Run the overlap pipeline on a map file.
    Pipeline(commands::PipelineCmd),
    /// Complete tripartite or box extraction from a graph or hypergraph.
    Extract(commands::Extract),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ChainsVerify(_) => "chains-verify",
            Command::Cofill(_) => "cofill",
            Command::SphereExp(_) => "sphere-exp",
            Command::ColorSearch(_) => "color-search",
            Command::CliqueProb(_) => "clique-prob",
            Command::Bounds(_) => "bounds",
            Command::BuildMap(_) => "build-map",
            Command::Pipeline(_) => "pipeline",
            Command::Extract(_) => "extract",
        }
    }
}

/// The result of one command before it is written out.
pub enum Artifact {
    /// Wrapped in the standard envelope.
    Report { config: Value, result: Value },
    /// Already a full document, e.g. a map file; gets a `meta` key.
    Document { config: Value, body: Value },
    /// CSV rows; config and version go in `#` header lines.
    Csv { config: Value, body: String },
}

fn envelope(command: &str, seed: Option<u64>, config: Value) -> Value {
    json!({ "tool": "pachlab", "version": VERSION, "command": command, "seed": seed, "config": config })
}

fn render(command: &str, g: &GlobalOpts, artifact: Artifact) -> String {
    match artifact {
        Artifact::Report { config, result } => {
            let mut doc = envelope(command, g.seed, config);
            doc["result"] = result;
            pretty(&doc)
        }
        Artifact::Document { config, mut body } => {
            body["meta"] = envelope(command, g.seed, config);
            pretty(&body)
        }
        Artifact::Csv { config, body } => {
            let meta = envelope(command, g.seed, config);
            format!("# {}\n{body}", serde_json::to_string(&meta).expect("json"))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

/// Splices `--config` file entries into argv ahead of parsing.
fn expand_config(mut args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].split_once('=') {
        Some((_, p)) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or_else(|| CliError::Usage("--config needs a path".into()))?,
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone().into(), source })?;
    let obj: serde_json::Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
    for (key, value) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        if args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match value {
            Value::Bool(true) => args.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => args.extend([flag, s]),
            Value::Number(n) => args.extend([flag, n.to_string()]),
            other => return Err(CliError::Parse(format!("config key {key}: unsupported value {other}"))),
        }
    }
    Ok(args)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let name = cli.command.name();
    let artifact = match &cli.command {
        Command::ChainsVerify(c) => c.run(g)?,
        Command::Cofill(c) => c.run(g)?,
        Command::SphereExp(c) => c.run(g)?,
        Command::ColorSearch(c) => c.run(g)?,
        Command::CliqueProb(c) => c.run(g)?,
        Command::Bounds(c) => c.run(g)?,
        Command::BuildMap(c) => c.run(g)?,
        Command::Pipeline(c) => c.run(g)?,
        Command::Extract(c) => c.run(g)?,
    };
    let text = render(name, g, artifact);
    match &g.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(command: Option<&str>, err: &CliError) -> ExitCode {
    let record = json!({
        "error": {
            "command": command,
            "kind": err.kind(),
            "message": err.to_string(),
            "details": err.details(),
        },
        "version": VERSION,
    });
    eprintln!("{}", serde_json::to_string_pretty(&record).expect("json"));
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return fail(None, &e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(None, &CliError::Usage(e.to_string())),
    };
    let name = cli.command.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(Some(name), &e),
    }
}
