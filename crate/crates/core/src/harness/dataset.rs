use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ground::KbLambdaExpr;
use crate::kb::{GoldGrounding, KbName};
use crate::lambda::LambdaExpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum Category {
    Simple,
    Medium,
    Complex,
    #[default]
    Unlabeled,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Simple, Category::Medium, Category::Complex, Category::Unlabeled];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Simple => "SIMPLE",
            Category::Medium => "MEDIUM",
            Category::Complex => "COMPLEX",
            Category::Unlabeled => "UNLABELED",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub question: String,
    /// Gold AMR in PENMAN notation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_lambda: Option<LambdaExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_grounding: Option<GoldGrounding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_kb_lambda: Option<KbLambdaExpr>,
    #[serde(default)]
    pub gold_sparql: String,
    /// Answers as prefixed names, IRIs or literal lexical forms.
    pub gold_answers: BTreeSet<String>,
    #[serde(default)]
    pub category: Category,
    pub kb: KbName,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("dataset line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("dataset line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
}

/// Reads JSON Lines; blank lines are skipped.
pub fn load_dataset(text: &str) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: DatasetRecord = serde_json::from_str(line).map_err(|e| DatasetError::Record {
            line: i + 1,
            message: e.to_string(),
        })?;
        if !ids.insert(rec.id.clone()) {
            return Err(DatasetError::DuplicateId { line: i + 1, id: rec.id });
        }
        out.push(rec);
    }
    Ok(out)
}
