use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::dataset::{Category, DatasetRecord};
use super::metrics::score;
use super::pipeline::{gold_answers, run_pipeline, PipelineContext, PipelineError, Stage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub id: String,
    pub category: Category,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub answers: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub overrides: Vec<Stage>,
    pub questions: Vec<QuestionScore>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: BTreeMap<Category, usize>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Scores every record; macro averages are plain means over questions.
pub fn evaluate(
    records: &[DatasetRecord],
    overrides: &BTreeSet<Stage>,
    ctx: &PipelineContext<'_>,
) -> Result<ScoreReport, PipelineError> {
    let mut questions = Vec::with_capacity(records.len());
    let mut counts = BTreeMap::new();
    for r in records {
        let run = run_pipeline(r, overrides, ctx)?;
        let s = score(&gold_answers(r), &run.answers);
        *counts.entry(r.category).or_insert(0) += 1;
        questions.push(QuestionScore {
            id: r.id.clone(),
            category: r.category,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
            answers: run.answers,
            error: run.trace.error,
        });
    }
    Ok(ScoreReport {
        overrides: overrides.iter().copied().collect(),
        precision: mean(questions.iter().map(|q| q.precision)),
        recall: mean(questions.iter().map(|q| q.recall)),
        f1: mean(questions.iter().map(|q| q.f1)),
        questions,
        counts,
    })
}

impl ScoreReport {
    /// Aligned plain-text table: one row per question, then the macro row.
    pub fn to_table(&self) -> String {
        let label = if self.overrides.is_empty() {
            "none".to_string()
        } else {
            self.overrides.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("+")
        };
        let mut rows: Vec<[String; 5]> = vec![["question".into(), "category".into(), "P".into(), "R".into(), "F1".into()]];
        for q in &self.questions {
            rows.push([
                q.id.clone(),
                q.category.to_string(),
                format!("{:.2}", q.precision),
                format!("{:.2}", q.recall),
                format!("{:.2}", q.f1),
            ]);
        }
        rows.push([
            format!("macro ({label})"),
            String::new(),
            format!("{:.2}", self.precision),
            format!("{:.2}", self.recall),
            format!("{:.2}", self.f1),
        ]);
        let widths: Vec<usize> = (0..5).map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for (n, r) in rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:<w0$}  {:<w1$}  {:>w2$}  {:>w3$}  {:>w4$}",
                r[0],
                r[1],
                r[2],
                r[3],
                r[4],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3],
                w4 = widths[4]
            );
            if n == 0 || n == rows.len() - 2 {
                let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 8));
            }
        }
        let counts: Vec<String> = self.counts.iter().map(|(c, n)| format!("{c}={n}")).collect();
        let _ = writeln!(out, "counts: {}", counts.join(" "));
        out
    }
}
