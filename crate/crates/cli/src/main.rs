//! `kbqa`: runs each stage of the question answering pipeline from the
//! shell. Every stage prints JSON that the next stage accepts as input.

mod commands;
mod config;
mod error;

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use kbqa_core::harness::Stage;
use kbqa_core::KbName;

use config::{CliConfig, Format, OrdinalArg};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "kbqa", version, about = "Temporal question answering over knowledge graphs")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Knowledge base profile: wikidata or dbpedia.
    #[arg(long, global = true)]
    pub kb: Option<KbName>,
    /// Lexicon JSON used for entity and relation linking.
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// N-Triples file to run queries against.
    #[arg(long, global = true, conflicts_with = "endpoint_url")]
    pub store: Option<PathBuf>,
    /// SPARQL endpoint to run queries against.
    #[arg(long, global = true)]
    pub endpoint_url: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Instant used for now(), as RFC 3339.
    #[arg(long, global = true)]
    pub now: Option<DateTime<Utc>>,
    #[arg(long, global = true, value_enum)]
    pub ordinal_mode: Option<OrdinalArg>,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input file, `-` for stdin. PENMAN text, SPARQL text or the JSON
    /// printed by an earlier stage.
    #[arg(long, visible_alias = "amr", default_value = "-")]
    pub input: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse PENMAN into graph JSON.
    Parse(InputArgs),
    /// Translate an AMR graph into a lambda expression.
    Translate(InputArgs),
    /// Link a lambda expression to KB entities and properties.
    Ground {
        #[command(flatten)]
        input: InputArgs,
        /// Gold grounding JSON, used instead of the lexicon.
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Build the SPARQL query.
    Emit {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Run end to end and print the answers.
    Run {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Score a JSON Lines dataset.
    Eval {
        /// Dataset with gold annotations.
        #[arg(long)]
        gold: PathBuf,
        /// Stages replaced by their gold values, comma separated.
        #[arg(long = "override", value_delimiter = ',')]
        overrides: Vec<Stage>,
    },
    /// Label queries SIMPLE, MEDIUM or COMPLEX.
    Categorize {
        #[command(flatten)]
        input: InputArgs,
        /// Dataset whose gold queries are labeled instead of the input.
        #[arg(long)]
        gold: Option<PathBuf>,
    },
}

pub(crate) fn read_path(path: &Path) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    let settings = CliConfig::from_env()?.resolve(&cli.global)?;
    let mut run = commands::Runner::new(settings);
    match cli.command {
        Command::Parse(i) => run.parse(&i.input),
        Command::Translate(i) => run.translate(&i.input),
        Command::Ground { input, gold } => run.ground(&input.input, gold.as_deref()),
        Command::Emit { input, gold } => run.emit(&input.input, gold.as_deref()),
        Command::Run { input, gold } => run.run(&input.input, gold.as_deref()),
        Command::Eval { gold, overrides } => run.eval(&gold, &overrides.into_iter().collect::<BTreeSet<_>>()),
        Command::Categorize { input, gold } => run.categorize(&input.input, gold.as_deref()),
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 2 and name the offending flag.
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e @ CliError::Usage { .. }) => Cli::command().error(ErrorKind::MissingRequiredArgument, e).exit(),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
