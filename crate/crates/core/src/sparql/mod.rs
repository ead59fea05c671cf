//! SPARQL query model for the subset this crate emits and evaluates.

mod emit;
mod parse;
mod render;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rdf::{Iri, Literal, RdfTerm};

pub use emit::{emit, interval_relation, EmitError, IntervalRelation};
pub use parse::{parse_sparql, SparqlParseError};
pub use render::render;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum QueryForm {
    Select,
    Ask,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    Vars(Vec<String>),
    Count {
        var: String,
        distinct: bool,
        alias: String,
    },
}

/// Variable or constant in a triple pattern or expression. Serialized as
/// SPARQL text with full IRIs: `?x`, `<http://…>`, `"1997"^^<…#integer>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PatternTerm {
    Var(String),
    Term(RdfTerm),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }

    pub fn iri(i: Iri) -> Self {
        PatternTerm::Term(RdfTerm::Iri(i))
    }

    pub fn literal(l: Literal) -> Self {
        PatternTerm::Term(RdfTerm::Literal(l))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

impl From<PatternTerm> for String {
    fn from(t: PatternTerm) -> String {
        match t {
            PatternTerm::Var(v) => format!("?{v}"),
            PatternTerm::Term(t) => t.to_string(),
        }
    }
}

impl TryFrom<String> for PatternTerm {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        parse::parse_pattern_term(&s).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: PatternTerm, object: PatternTerm) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(PatternTerm::as_var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Expression {
    Term {
        term: PatternTerm,
    },
    Now,
    Add {
        left: Box<Expression>,
        right: Box<Expression>,
    },
    Sub {
        left: Box<Expression>,
        right: Box<Expression>,
    },
    Compare {
        op: CompareOp,
        left: Box<Expression>,
        right: Box<Expression>,
    },
    And {
        left: Box<Expression>,
        right: Box<Expression>,
    },
    Or {
        left: Box<Expression>,
        right: Box<Expression>,
    },
    Not {
        inner: Box<Expression>,
    },
    Bound {
        var: String,
    },
}

impl Expression {
    pub fn var(name: impl Into<String>) -> Self {
        Expression::Term {
            term: PatternTerm::var(name),
        }
    }

    pub fn term(term: PatternTerm) -> Self {
        Expression::Term { term }
    }

    pub fn compare(op: CompareOp, left: Expression, right: Expression) -> Self {
        Expression::Compare {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn and(left: Expression, right: Expression) -> Self {
        Expression::And {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(left: Expression, right: Expression) -> Self {
        Expression::Add {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expression::Term { term } => {
                if let Some(v) = term.as_var() {
                    out.insert(v);
                }
            }
            Expression::Now => {}
            Expression::Bound { var } => {
                out.insert(var);
            }
            Expression::Not { inner } => inner.collect_vars(out),
            Expression::Add { left, right }
            | Expression::Sub { left, right }
            | Expression::Compare { left, right, .. }
            | Expression::And { left, right }
            | Expression::Or { left, right } => {
                left.collect_vars(out);
                right.collect_vars(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    Triple(TriplePattern),
    Filter {
        expr: Expression,
    },
    Bind {
        expr: Expression,
        var: String,
    },
    /// Two or more alternative groups.
    Union {
        branches: Vec<Vec<Element>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderKey {
    pub var: String,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparqlQuery {
    /// `(prefix, namespace)` pairs declared by the query.
    pub prefixes: Vec<(String, String)>,
    pub form: QueryForm,
    pub distinct: bool,
    pub projection: Projection,
    #[serde(rename = "where")]
    pub where_clause: Vec<Element>,
    pub order_by: Option<OrderKey>,
    pub limit: Option<u64>,
    pub offset: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryViolation(pub String);

impl fmt::Display for QueryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Variables bound by a group: triple-pattern variables and BIND targets,
/// including those bound in every UNION branch.
pub(crate) fn bound_vars(elements: &[Element], out: &mut BTreeSet<String>) {
    for e in elements {
        match e {
            Element::Triple(t) => out.extend(t.vars().map(str::to_string)),
            Element::Bind { var, .. } => {
                out.insert(var.clone());
            }
            Element::Union { branches } => {
                for b in branches {
                    bound_vars(b, out);
                }
            }
            Element::Filter { .. } => {}
        }
    }
}

impl SparqlQuery {
    /// Every variable any pattern or BIND can bind.
    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        bound_vars(&self.where_clause, &mut out);
        out
    }

    /// Names of the result columns.
    pub fn result_vars(&self) -> Vec<String> {
        match &self.projection {
            Projection::Vars(v) => v.clone(),
            Projection::Count { alias, .. } => vec![alias.clone()],
        }
    }

    /// Structural checks done before rendering or evaluation.
    pub fn validate(&self) -> Result<(), Vec<QueryViolation>> {
        let mut out = Vec::new();
        if self.where_clause.is_empty() {
            out.push(QueryViolation("empty WHERE clause".into()));
        }
        let bound = self.bound_vars();
        if self.form == QueryForm::Select {
            let needed: Vec<&String> = match &self.projection {
                Projection::Vars(v) => {
                    if v.is_empty() {
                        out.push(QueryViolation("SELECT projects no variables".into()));
                    }
                    v.iter().collect()
                }
                Projection::Count { var, .. } => vec![var],
            };
            for v in needed {
                if !bound.contains(v) {
                    out.push(QueryViolation(format!(
                        "projected ?{v} does not occur in WHERE"
                    )));
                }
            }
        }
        if let Some(k) = &self.order_by {
            if !bound.contains(&k.var) {
                out.push(QueryViolation(format!(
                    "ORDER BY ?{} does not occur in WHERE",
                    k.var
                )));
            }
        }
        if self.limit == Some(0) {
            out.push(QueryViolation("LIMIT must be positive".into()));
        }
        check_binds(&self.where_clause, &mut BTreeSet::new(), &mut out);
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

/// A BIND target must not be bound anywhere before it in its scope.
fn check_binds(elements: &[Element], seen: &mut BTreeSet<String>, out: &mut Vec<QueryViolation>) {
    for e in elements {
        match e {
            Element::Triple(t) => {
                for v in t.vars() {
                    seen.insert(v.to_string());
                }
            }
            Element::Bind { var, .. } => {
                if !seen.insert(var.clone()) {
                    out.push(QueryViolation(format!(
                        "BIND target ?{var} is already bound"
                    )));
                }
            }
            Element::Union { branches } => {
                if branches.len() < 2 {
                    out.push(QueryViolation("UNION needs at least two branches".into()));
                }
                let mut all = BTreeSet::new();
                for b in branches {
                    let mut s = seen.clone();
                    check_binds(b, &mut s, out);
                    all.extend(s);
                }
                seen.extend(all);
            }
            Element::Filter { .. } => {}
        }
    }
    // A variable bound later by a triple after being a BIND target would
    // silently turn into a join on a computed value.
    let mut binds = BTreeSet::new();
    for e in elements {
        match e {
            Element::Bind { var, .. } => {
                binds.insert(var.as_str());
            }
            Element::Triple(t) => {
                for v in t.vars() {
                    if binds.contains(v) {
                        out.push(QueryViolation(format!(
                            "?{v} is used in a pattern after being a BIND target"
                        )));
                    }
                }
            }
            _ => {}
        }
    }
}

impl fmt::Display for SparqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
