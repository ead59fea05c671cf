use serde_json::{json, Value};
use thiserror::Error;

use kbqa_core::endpoint::EndpointError;
use kbqa_core::harness::{DatasetError, PipelineError};
use kbqa_core::kb::LexiconError;
use kbqa_core::sparql::{EmitError, SparqlParseError};
use kbqa_core::store::{EvalError, NTriplesError};
use kbqa_core::{GroundError, PenmanError, TranslateError};

/// Domain failures; each is reported as one JSON object and exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("config: {detail}")]
    Config { detail: String },
    /// A flag needed by this subcommand is missing; exits with 2.
    #[error("{detail} ({flag})")]
    Usage { flag: &'static str, detail: String },
    #[error("query execution failed: {detail}")]
    Execution { detail: String },
    #[error("input: {detail}")]
    Input { detail: String },
    #[error(transparent)]
    Penman(#[from] PenmanError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("sparql: {0}")]
    Sparql(#[from] SparqlParseError),
    #[error(transparent)]
    Store(#[from] NTriplesError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Endpoint(#[from] EndpointError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Config { .. } => "config",
            CliError::Usage { .. } => "usage",
            CliError::Execution { .. } => "execution",
            CliError::Input { .. } => "input",
            CliError::Penman(_) => "penman",
            CliError::Translate(_) => "translate",
            CliError::Lexicon(_) => "lexicon",
            CliError::Ground(_) => "ground",
            CliError::Emit(_) => "emit",
            CliError::Sparql(_) => "sparql",
            CliError::Store(_) => "store",
            CliError::Eval(_) => "eval",
            CliError::Endpoint(_) => "endpoint",
            CliError::Dataset(_) => "dataset",
            CliError::Pipeline(_) => "pipeline",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        let detail = match self {
            CliError::Ground(e) => serde_json::to_value(e).ok(),
            CliError::Eval(e) => serde_json::to_value(e).ok(),
            CliError::Endpoint(e) => serde_json::to_value(e).ok(),
            CliError::Store(e) => Some(json!({ "line": e.line })),
            CliError::Sparql(e) => Some(json!({ "position": e.position })),
            _ => None,
        };
        if let Some(d) = detail {
            v["detail"] = d;
        }
        v
    }
}
