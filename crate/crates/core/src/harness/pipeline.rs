use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dataset::DatasetRecord;
use super::metrics::{normalize_answer, normalize_term};
use crate::endpoint::Endpoint;
use crate::ground::{ground_with, KbLambdaExpr, Linker, SplitLinker};
use crate::kb::{KbProfile, Lexicon};
use crate::penman::parse_penman;
use crate::rules::{translate_with, RuleConfig};
use crate::sparql::{emit, parse_sparql, render, SparqlQuery};
use crate::store::{eval, QueryResult, TripleStore};

/// A pipeline stage whose output can be replaced by the gold artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    GtAmr,
    GtLambda,
    GtEl,
    GtRl,
    GtKbLambda,
    GtSparql,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::GtAmr,
        Stage::GtLambda,
        Stage::GtEl,
        Stage::GtRl,
        Stage::GtKbLambda,
        Stage::GtSparql,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::GtAmr => "GT_AMR",
            Stage::GtLambda => "GT_LAMBDA",
            Stage::GtEl => "GT_EL",
            Stage::GtRl => "GT_RL",
            Stage::GtKbLambda => "GT_KB_LAMBDA",
            Stage::GtSparql => "GT_SPARQL",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.trim().replace('-', "_").to_ascii_uppercase();
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == norm)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

/// Anything that can answer a query.
pub trait Executor {
    fn execute(&self, q: &SparqlQuery) -> Result<QueryResult, String>;
}

pub struct StoreExecutor<'a> {
    pub store: &'a TripleStore,
    pub now: DateTime<Utc>,
}

impl Executor for StoreExecutor<'_> {
    fn execute(&self, q: &SparqlQuery) -> Result<QueryResult, String> {
        eval(q, self.store, self.now).map_err(|e| e.to_string())
    }
}

impl Executor for Endpoint {
    fn execute(&self, q: &SparqlQuery) -> Result<QueryResult, String> {
        Endpoint::execute(self, &render(q)).map_err(|e| e.to_string())
    }
}

pub struct PipelineContext<'a> {
    pub lexicon: &'a Lexicon,
    pub rules: RuleConfig,
    pub executor: &'a dyn Executor,
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum PipelineError {
    #[error("override {stage} needs a gold artifact the record does not have")]
    MissingGoldStage { stage: Stage },
}

/// Every intermediate representation produced for one question. A failing
/// stage stops the run and is recorded in `error`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub amr: Option<String>,
    pub lambda: Option<String>,
    pub kb_lambda: Option<String>,
    pub sparql: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    /// Normalized answers.
    pub answers: BTreeSet<String>,
    pub trace: Trace,
}

fn check_gold(record: &DatasetRecord, overrides: &BTreeSet<Stage>) -> Result<(), PipelineError> {
    let gold = record.gold_grounding.as_ref();
    for &stage in overrides {
        let present = match stage {
            Stage::GtAmr => record.amr.is_some(),
            Stage::GtLambda => record.gold_lambda.is_some(),
            Stage::GtEl => gold.is_some_and(|g| !g.entities.is_empty()),
            Stage::GtRl => gold.is_some_and(|g| !g.relations.is_empty()),
            Stage::GtKbLambda => record.gold_kb_lambda.is_some(),
            Stage::GtSparql => !record.gold_sparql.trim().is_empty(),
        };
        if !present {
            return Err(PipelineError::MissingGoldStage { stage });
        }
    }
    Ok(())
}

/// Runs one record, replacing each overridden stage by its gold artifact.
/// Text-to-AMR parsing is outside this crate, so the AMR always comes from
/// the record.
pub fn run_pipeline(
    record: &DatasetRecord,
    overrides: &BTreeSet<Stage>,
    ctx: &PipelineContext<'_>,
) -> Result<PipelineRun, PipelineError> {
    check_gold(record, overrides)?;
    let kb = KbProfile::by_name(record.kb);
    let mut trace = Trace::default();
    let answers = match stages(record, overrides, ctx, &kb, &mut trace) {
        Ok(result) => result
            .answers()
            .iter()
            .map(|t| normalize_term(t, &kb))
            .collect(),
        Err(e) => {
            trace.error = Some(e);
            BTreeSet::new()
        }
    };
    Ok(PipelineRun { answers, trace })
}

fn stages(
    record: &DatasetRecord,
    overrides: &BTreeSet<Stage>,
    ctx: &PipelineContext<'_>,
    kb: &KbProfile,
    trace: &mut Trace,
) -> Result<QueryResult, String> {
    let query = if overrides.contains(&Stage::GtSparql) {
        parse_sparql(&record.gold_sparql).map_err(|e| format!("gold SPARQL: {e}"))?
    } else {
        let grounded = grounded(record, overrides, ctx, kb, trace)?;
        trace.kb_lambda = Some(grounded.pretty());
        emit(&grounded, kb).map_err(|e| e.to_string())?
    };
    trace.sparql = Some(render(&query));
    ctx.executor.execute(&query)
}

fn grounded(
    record: &DatasetRecord,
    overrides: &BTreeSet<Stage>,
    ctx: &PipelineContext<'_>,
    kb: &KbProfile,
    trace: &mut Trace,
) -> Result<KbLambdaExpr, String> {
    if overrides.contains(&Stage::GtKbLambda) {
        return Ok(record.gold_kb_lambda.clone().expect("checked"));
    }
    let lambda = match &record.gold_lambda {
        Some(l) if overrides.contains(&Stage::GtLambda) => l.clone(),
        _ => {
            let amr = record.amr.as_deref().ok_or("record has no AMR")?;
            trace.amr = Some(amr.to_string());
            let graph = parse_penman(amr).map_err(|e| e.to_string())?;
            translate_with(&graph, &ctx.rules).map_err(|e| e.to_string())?.expr
        }
    };
    trace.lambda = Some(lambda.pretty());
    let gold = record.gold_grounding.clone().unwrap_or_default();
    let pick = |stage| -> &dyn Linker {
        if overrides.contains(&stage) {
            &gold
        } else {
            ctx.lexicon
        }
    };
    let linker = SplitLinker {
        entities: pick(Stage::GtEl),
        relations: pick(Stage::GtRl),
    };
    ground_with(&lambda, &linker, kb).map_err(|e| serde_json::to_string(&e).unwrap_or_else(|_| e.to_string()))
}

/// Gold answers of a record in normalized form.
pub fn gold_answers(record: &DatasetRecord) -> BTreeSet<String> {
    let kb = KbProfile::by_name(record.kb);
    record.gold_answers.iter().map(|a| normalize_answer(a, &kb)).collect()
}
