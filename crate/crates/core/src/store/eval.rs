use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{eval_expr, filter_holds};
use super::TripleStore;
use crate::rdf::{order_terms, Literal, RdfTerm};
use crate::sparql::{Element, PatternTerm, Projection, QueryForm, SparqlQuery, TriplePattern};

/// One solution: variable name to term. Unbound variables are absent.
pub type Binding = BTreeMap<String, RdfTerm>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryResult {
    Bindings {
        vars: Vec<String>,
        rows: Vec<Binding>,
    },
    Boolean(bool),
}

impl QueryResult {
    /// Values of the first result column, or the boolean as a literal.
    pub fn answers(&self) -> Vec<RdfTerm> {
        match self {
            QueryResult::Boolean(b) => vec![RdfTerm::Literal(Literal::Boolean(*b))],
            QueryResult::Bindings { vars, rows } => {
                let Some(first) = vars.first() else {
                    return Vec::new();
                };
                rows.iter().filter_map(|r| r.get(first).cloned()).collect()
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum EvalError {
    #[error("query is invalid: {detail}")]
    InvalidQuery { detail: String },
}

pub(crate) fn check(q: &SparqlQuery) -> Result<(), EvalError> {
    q.validate().map_err(|v| EvalError::InvalidQuery {
        detail: v
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    })
}

/// Evaluates by index nested-loop joins in element order. `now` is the
/// instant `now()` returns.
pub fn eval(
    q: &SparqlQuery,
    store: &TripleStore,
    now: DateTime<Utc>,
) -> Result<QueryResult, EvalError> {
    check(q)?;
    let sols = group(&q.where_clause, vec![Binding::new()], store, now);
    Ok(finish(q, sols))
}

fn group(
    elements: &[Element],
    input: Vec<Binding>,
    store: &TripleStore,
    now: DateTime<Utc>,
) -> Vec<Binding> {
    let mut sols = input;
    let mut filters = Vec::new();
    for e in elements {
        match e {
            Element::Triple(t) => {
                sols = sols
                    .iter()
                    .flat_map(|s| match_triple(t, s, store))
                    .collect();
            }
            Element::Bind { expr, var } => {
                for s in &mut sols {
                    if let Ok(v) = eval_expr(expr, &|n| s.get(n), now) {
                        s.insert(var.clone(), v);
                    }
                }
            }
            Element::Union { branches } => {
                sols = sols
                    .iter()
                    .flat_map(|s| {
                        branches
                            .iter()
                            .flat_map(|b| group(b, vec![s.clone()], store, now))
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
            Element::Filter { expr } => filters.push(expr),
        }
    }
    sols.retain(|s| filters.iter().all(|f| filter_holds(f, &|n| s.get(n), now)));
    sols
}

fn match_triple(t: &TriplePattern, s: &Binding, store: &TripleStore) -> Vec<Binding> {
    let resolve = |p: &PatternTerm| -> Option<RdfTerm> {
        match p {
            PatternTerm::Var(v) => s.get(v).cloned(),
            PatternTerm::Term(t) => Some(t.clone()),
        }
    };
    let (rs, rp, ro) = (
        resolve(&t.subject),
        resolve(&t.predicate),
        resolve(&t.object),
    );
    let mut out = Vec::new();
    'rows: for row in store.matching(rs.as_ref(), rp.as_ref(), ro.as_ref()) {
        let mut b = s.clone();
        for (pat, val) in [&t.subject, &t.predicate, &t.object].into_iter().zip(row) {
            if let PatternTerm::Var(v) = pat {
                match b.get(v) {
                    Some(existing) if existing != val => continue 'rows,
                    Some(_) => {}
                    None => {
                        b.insert(v.clone(), val.clone());
                    }
                }
            }
        }
        out.push(b);
    }
    out
}

fn row_key(vars: &[String], b: &Binding) -> Vec<Option<String>> {
    vars.iter()
        .map(|v| b.get(v).map(RdfTerm::canonical))
        .collect()
}

/// Solution modifiers: aggregation, ordering, projection, DISTINCT, then
/// OFFSET and LIMIT. Rows that tie on the sort key, and all rows of an
/// unordered query, are ordered by their projected canonical text.
pub(crate) fn finish(q: &SparqlQuery, mut sols: Vec<Binding>) -> QueryResult {
    if q.form == QueryForm::Ask {
        return QueryResult::Boolean(!sols.is_empty());
    }
    let vars = q.result_vars();
    if let Projection::Count {
        var,
        distinct,
        alias,
    } = &q.projection
    {
        let values = sols.iter().filter_map(|s| s.get(var));
        let n = if *distinct {
            values.collect::<HashSet<_>>().len()
        } else {
            values.count()
        };
        let mut row = Binding::new();
        row.insert(alias.clone(), RdfTerm::Literal(Literal::Integer(n as i64)));
        return QueryResult::Bindings {
            vars,
            rows: vec![row],
        };
    }
    sols.sort_by(|a, b| {
        let keyed = match &q.order_by {
            Some(k) => {
                let o = order_terms(a.get(&k.var), b.get(&k.var));
                if k.descending {
                    o.reverse()
                } else {
                    o
                }
            }
            None => Ordering::Equal,
        };
        keyed.then_with(|| row_key(&vars, a).cmp(&row_key(&vars, b)))
    });
    let projected = sols.into_iter().map(|s| {
        s.into_iter()
            .filter(|(k, _)| vars.contains(k))
            .collect::<Binding>()
    });
    let mut rows: Vec<Binding> = if q.distinct {
        let mut seen = BTreeSet::new();
        projected
            .filter(|r| seen.insert(row_key(&vars, r)))
            .collect()
    } else {
        projected.collect()
    };
    let offset = q.offset.unwrap_or(0).min(rows.len() as u64) as usize;
    rows.drain(..offset);
    if let Some(l) = q.limit {
        rows.truncate(l.min(usize::MAX as u64) as usize);
    }
    QueryResult::Bindings { vars, rows }
}
