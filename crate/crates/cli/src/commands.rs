use std::collections::BTreeSet;
use std::path::Path;

use kbqa_core::endpoint::Endpoint;
use kbqa_core::harness::{categorize, evaluate, load_dataset, normalize_term, Executor, PipelineContext, Stage, StoreExecutor};
use kbqa_core::kb::LexiconFile;
use kbqa_core::rules::AppliedRule;
use kbqa_core::{
    emit, ground, ground_with_gold, load_ntriples, parse_penman, parse_sparql, render, translate_with, AmrGraph,
    GoldGrounding, KbLambdaExpr, KbProfile, LambdaExpr, Lexicon, RuleConfig, SparqlQuery, TripleStore,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Backend, Format, Settings};
use crate::error::CliError;
use crate::read_path;

/// What one stage hands to the next.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Artifact {
    Amr {
        graph: AmrGraph,
    },
    Lambda {
        expr: LambdaExpr,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        trace: Vec<AppliedRule>,
    },
    KbLambda {
        expr: KbLambdaExpr,
    },
    Sparql {
        query: String,
    },
}

impl Artifact {
    fn kind(&self) -> &'static str {
        match self {
            Artifact::Amr { .. } => "amr",
            Artifact::Lambda { .. } => "lambda",
            Artifact::KbLambda { .. } => "kb_lambda",
            Artifact::Sparql { .. } => "sparql",
        }
    }
}

fn json_out<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("outputs serialize");
    s.push('\n');
    s
}

fn unexpected(got: &Artifact, wanted: &str) -> CliError {
    CliError::Input {
        detail: format!("expected {wanted}, got a {} artifact", got.kind()),
    }
}

pub struct Runner {
    settings: Settings,
    kb: KbProfile,
    rules: RuleConfig,
}

impl Runner {
    pub fn new(settings: Settings) -> Self {
        let kb = KbProfile::by_name(settings.kb);
        let rules = RuleConfig {
            ordinal_offset_mode: settings.ordinal_offset_mode,
            ..RuleConfig::default()
        };
        Runner { settings, kb, rules }
    }

    fn read_artifact(&self, path: &Path) -> Result<Artifact, CliError> {
        let text = read_path(path)?;
        let t = text.trim_start();
        if t.starts_with('{') {
            serde_json::from_str(t).map_err(|e| CliError::Input { detail: e.to_string() })
        } else if t.starts_with('(') {
            Ok(Artifact::Amr { graph: parse_penman(t)? })
        } else {
            Ok(Artifact::Sparql { query: text })
        }
    }

    fn lexicon(&self, required: bool) -> Result<Lexicon, CliError> {
        match &self.settings.lexicon {
            Some(p) => Ok(Lexicon::from_json(&read_path(p)?)?),
            None if required => Err(CliError::Usage {
                flag: "--lexicon",
                detail: "linking needs a lexicon (or --gold)".into(),
            }),
            None => Ok(Lexicon::new(LexiconFile::default())?),
        }
    }

    fn executor(&self) -> Result<Box<dyn Executor>, CliError> {
        Ok(match &self.settings.backend {
            Some(Backend::Store(p)) => Box::new(OwnedStore(load_ntriples(&read_path(p)?)?, self.settings.now)),
            Some(Backend::Endpoint(cfg)) => Box::new(Endpoint::new(cfg.clone())),
            None => {
                return Err(CliError::Usage {
                    flag: "--store",
                    detail: "running queries needs --store or --endpoint-url".into(),
                })
            }
        })
    }

    fn to_lambda(&self, a: Artifact) -> Result<(LambdaExpr, Vec<AppliedRule>), CliError> {
        match a {
            Artifact::Amr { graph } => {
                let t = translate_with(&graph, &self.rules)?;
                Ok((t.expr, t.applied))
            }
            Artifact::Lambda { expr, trace } => Ok((expr, trace)),
            other => Err(unexpected(&other, "an AMR or lambda expression")),
        }
    }

    fn to_kb(&self, a: Artifact, gold: Option<&Path>) -> Result<KbLambdaExpr, CliError> {
        if let Artifact::KbLambda { expr } = a {
            return Ok(expr);
        }
        let (expr, _) = self.to_lambda(a)?;
        Ok(match gold {
            Some(p) => {
                let g: GoldGrounding = serde_json::from_str(&read_path(p)?).map_err(|e| CliError::Input {
                    detail: format!("{}: {e}", p.display()),
                })?;
                ground_with_gold(&expr, &g, &self.kb)?
            }
            None => ground(&expr, &self.lexicon(true)?, &self.kb)?,
        })
    }

    fn to_query(&self, a: Artifact, gold: Option<&Path>) -> Result<SparqlQuery, CliError> {
        match a {
            Artifact::Sparql { query } => Ok(parse_sparql(&query)?),
            other => Ok(emit(&self.to_kb(other, gold)?, &self.kb)?),
        }
    }

    pub fn parse(&mut self, input: &Path) -> Result<String, CliError> {
        match self.read_artifact(input)? {
            a @ Artifact::Amr { .. } => Ok(json_out(&a)),
            other => Err(unexpected(&other, "PENMAN text")),
        }
    }

    pub fn translate(&mut self, input: &Path) -> Result<String, CliError> {
        let (expr, trace) = self.to_lambda(self.read_artifact(input)?)?;
        Ok(match self.settings.format {
            Format::Text => format!("{}\n", expr.pretty()),
            Format::Json => json_out(&Artifact::Lambda { expr, trace }),
        })
    }

    pub fn ground(&mut self, input: &Path, gold: Option<&Path>) -> Result<String, CliError> {
        let expr = self.to_kb(self.read_artifact(input)?, gold)?;
        Ok(match self.settings.format {
            Format::Text => format!("{}\n", expr.pretty()),
            Format::Json => json_out(&Artifact::KbLambda { expr }),
        })
    }

    pub fn emit(&mut self, input: &Path, gold: Option<&Path>) -> Result<String, CliError> {
        let query = render(&self.to_query(self.read_artifact(input)?, gold)?);
        Ok(match self.settings.format {
            Format::Text => format!("{query}\n"),
            Format::Json => json_out(&Artifact::Sparql { query }),
        })
    }

    pub fn run(&mut self, input: &Path, gold: Option<&Path>) -> Result<String, CliError> {
        let q = self.to_query(self.read_artifact(input)?, gold)?;
        let exec = self.executor()?;
        let result = exec.execute(&q).map_err(|detail| CliError::Execution { detail })?;
        let answers: BTreeSet<String> = result.answers().iter().map(|t| normalize_term(t, &self.kb)).collect();
        Ok(match self.settings.format {
            Format::Text => answers.iter().map(|a| format!("{a}\n")).collect(),
            Format::Json => json_out(&json!({ "answers": answers, "query": render(&q) })),
        })
    }

    pub fn eval(&mut self, dataset: &Path, overrides: &BTreeSet<Stage>) -> Result<String, CliError> {
        let records = load_dataset(&read_path(dataset)?)?;
        let lexicon = self.lexicon(false)?;
        let exec = self.executor()?;
        let ctx = PipelineContext {
            lexicon: &lexicon,
            rules: self.rules.clone(),
            executor: exec.as_ref(),
        };
        let report = evaluate(&records, overrides, &ctx)?;
        Ok(match self.settings.format {
            Format::Text => report.to_table(),
            Format::Json => json_out(&report),
        })
    }

    pub fn categorize(&mut self, input: &Path, gold: Option<&Path>) -> Result<String, CliError> {
        let labeled: Vec<(Option<String>, String)> = match gold {
            Some(p) => load_dataset(&read_path(p)?)?
                .into_iter()
                .map(|r| Ok((Some(r.id), categorize(&parse_sparql(&r.gold_sparql)?).to_string())))
                .collect::<Result<_, CliError>>()?,
            None => vec![(None, categorize(&self.to_query(self.read_artifact(input)?, None)?).to_string())],
        };
        Ok(match self.settings.format {
            Format::Text => labeled
                .iter()
                .map(|(id, c)| match id {
                    Some(id) => format!("{id}\t{c}\n"),
                    None => format!("{c}\n"),
                })
                .collect(),
            Format::Json => {
                let rows: Vec<_> = labeled
                    .iter()
                    .map(|(id, c)| match id {
                        Some(id) => json!({ "id": id, "category": c }),
                        None => json!({ "category": c }),
                    })
                    .collect();
                json_out(&if gold.is_some() { json!(rows) } else { rows[0].clone() })
            }
        })
    }
}

/// A store loaded from disk together with the instant used for now().
struct OwnedStore(TripleStore, chrono::DateTime<chrono::Utc>);

impl Executor for OwnedStore {
    fn execute(&self, q: &SparqlQuery) -> Result<kbqa_core::QueryResult, String> {
        StoreExecutor { store: &self.0, now: self.1 }.execute(q)
    }
}
