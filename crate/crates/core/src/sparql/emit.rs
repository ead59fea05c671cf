use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    CompareOp, Element, Expression, OrderKey, PatternTerm, Projection, QueryForm, SparqlQuery,
    TriplePattern,
};
use crate::ground::{IntervalSource, KbLambdaExpr, KbPredicate, KbTerm};
use crate::kb::KbProfile;
use crate::lambda::{
    Abstraction, Binder, CmpOp, Connective, Expr, IntervalVar, Term, TermChild, Var,
};
use crate::rdf::{Duration, Iri, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum EmitError {
    #[error("`{construct}` has no SPARQL translation")]
    UnemittableConstruct { construct: String },
    #[error("emitted query is invalid: {detail}")]
    Invalid { detail: String },
}

/// Translates a grounded expression into a query whose prefixes are the
/// profile's prefix table.
pub fn emit(e: &KbLambdaExpr, kb: &KbProfile) -> Result<SparqlQuery, EmitError> {
    let mut em = Emitter::new(e);
    let mut q = SparqlQuery {
        prefixes: kb.prefixes.clone(),
        form: QueryForm::Select,
        distinct: true,
        projection: Projection::Vars(Vec::new()),
        where_clause: Vec::new(),
        order_by: None,
        limit: None,
        offset: None,
    };
    match e {
        Expr::Abstraction(a) => {
            q.where_clause = em.term(&a.body)?;
            q.projection = Projection::Vars(project(a));
        }
        Expr::Count(a) => {
            q.where_clause = em.term(&a.body)?;
            let var = project(a).into_iter().next().unwrap_or_default();
            q.distinct = false;
            q.projection = Projection::Count {
                var,
                distinct: false,
                alias: em.fresh("c"),
            };
        }
        Expr::Min {
            inner,
            offset,
            limit,
        }
        | Expr::Max {
            inner,
            offset,
            limit,
        } => {
            q.where_clause = em.term(&inner.body)?;
            q.projection = Projection::Vars(project(inner));
            let sort = inner
                .bound
                .first()
                .cloned()
                .ok_or_else(|| EmitError::Invalid {
                    detail: "min/max binds no variable".into(),
                })?;
            let var = em.sort_start(&sort, &mut q.where_clause);
            q.order_by = Some(OrderKey {
                var,
                descending: matches!(e, Expr::Max { .. }),
            });
            q.limit = Some(*limit);
            q.offset = Some(*offset);
        }
        Expr::ArgMin {
            target,
            key,
            offset,
            limit,
        }
        | Expr::ArgMax {
            target,
            key,
            offset,
            limit,
        } => {
            let mut w = em.term(&target.body)?;
            w.extend(em.term(&key.body)?);
            q.projection = Projection::Vars(project(target));
            let sort = key
                .bound
                .get(1)
                .cloned()
                .ok_or_else(|| EmitError::Invalid {
                    detail: "key binds no sort variable".into(),
                })?;
            let var = em.sort_start(&sort, &mut w);
            q.where_clause = w;
            q.order_by = Some(OrderKey {
                var,
                descending: matches!(e, Expr::ArgMax { .. }),
            });
            q.limit = Some(*limit);
            q.offset = Some(*offset);
        }
        Expr::BooleanQuery { body, .. } => {
            q.form = QueryForm::Ask;
            q.distinct = false;
            q.where_clause = em.term(body)?;
        }
    }
    q.validate().map_err(|v| EmitError::Invalid {
        detail: v
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    })?;
    Ok(q)
}

/// Projected SPARQL variables; an interval projects both accessors.
fn project<P>(a: &Abstraction<P>) -> Vec<String> {
    a.bound
        .iter()
        .flat_map(|b| match b {
            Binder::Var(v) => vec![v.as_str().to_string()],
            Binder::Interval(i) => vec![i.start_name(), i.end_name()],
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalRelation {
    Overlap,
    Before,
    After,
}

/// Filter condition relating two intervals through their endpoint variables.
pub fn interval_relation(rel: IntervalRelation, left: &IntervalVar, right: &IntervalVar) -> Expression {
    match rel {
        IntervalRelation::Overlap => Expression::and(
            Expression::compare(CompareOp::Le, start(left), end(right)),
            Expression::compare(CompareOp::Le, start(right), end(left)),
        ),
        IntervalRelation::Before => Expression::compare(CompareOp::Le, end(left), start(right)),
        IntervalRelation::After => Expression::compare(CompareOp::Ge, start(left), end(right)),
    }
}

struct Emitter {
    taken: BTreeSet<String>,
}

fn var(v: &Var) -> PatternTerm {
    PatternTerm::var(v.as_str())
}

fn start(i: &IntervalVar) -> Expression {
    Expression::var(i.start_name())
}

fn end(i: &IntervalVar) -> Expression {
    Expression::var(i.end_name())
}

fn kb_term(t: &KbTerm) -> PatternTerm {
    match t {
        KbTerm::Var(v) => var(v),
        KbTerm::Iri(i) => PatternTerm::iri(i.clone()),
        KbTerm::Number(_) => {
            PatternTerm::literal(t.literal().expect("numbers convert to literals"))
        }
    }
}

fn triple(s: PatternTerm, p: &Iri, o: PatternTerm) -> Element {
    Element::Triple(TriplePattern::new(s, PatternTerm::iri(p.clone()), o))
}

fn bind(expr: Expression, var: String) -> Element {
    Element::Bind { expr, var }
}

fn filter(expr: Expression) -> Element {
    Element::Filter { expr }
}

impl Emitter {
    fn new(e: &KbLambdaExpr) -> Self {
        let mut taken = BTreeSet::new();
        for t in e.terms() {
            for b in t.binders() {
                match b {
                    Binder::Var(v) => {
                        taken.insert(v.as_str().to_string());
                    }
                    Binder::Interval(i) => {
                        taken.insert(i.start_name());
                        taken.insert(i.end_name());
                    }
                }
            }
        }
        Emitter { taken }
    }

    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut n = 2;
        while self.taken.contains(&name) {
            name = format!("{base}{n}");
            n += 1;
        }
        self.taken.insert(name.clone());
        name
    }

    /// The start accessor to order by; an ordinary variable is copied into
    /// `?<x>Start` first.
    fn sort_start(&mut self, sort: &Binder, w: &mut Vec<Element>) -> String {
        match sort {
            Binder::Interval(i) => i.start_name(),
            Binder::Var(v) => {
                let name = self.fresh(&format!("{v}Start"));
                w.push(bind(Expression::term(var(v)), name.clone()));
                name
            }
        }
    }

    fn term(&mut self, t: &Term<KbPredicate>) -> Result<Vec<Element>, EmitError> {
        match t.connective {
            Connective::And => {
                let mut out = Vec::new();
                for c in &t.children {
                    match c {
                        TermChild::Pred(p) => out.extend(self.predicate(p)?),
                        TermChild::Term(t) => out.extend(self.term(t)?),
                    }
                }
                Ok(out)
            }
            Connective::Or => {
                let mut branches = Vec::new();
                for c in &t.children {
                    branches.push(match c {
                        TermChild::Pred(p) => self.predicate(p)?,
                        TermChild::Term(t) => self.term(t)?,
                    });
                }
                Ok(match branches.len() {
                    0 => Vec::new(),
                    1 => branches.pop().expect("one branch"),
                    _ => vec![Element::Union { branches }],
                })
            }
        }
    }

    fn predicate(&mut self, p: &KbPredicate) -> Result<Vec<Element>, EmitError> {
        Ok(match p {
            KbPredicate::Triple {
                property,
                subject,
                object,
                statement,
                ..
            } => match (statement, &property.claim, &property.statement_value) {
                (Some(st), Some(claim), Some(value)) => vec![
                    triple(kb_term(subject), claim, var(st)),
                    triple(var(st), value, kb_term(object)),
                ],
                _ => vec![triple(kb_term(subject), &property.direct, kb_term(object))],
            },
            KbPredicate::Interval { ivar, source } => match source {
                IntervalSource::Statement {
                    statement,
                    start,
                    end,
                } => vec![
                    triple(var(statement), start, PatternTerm::var(ivar.start_name())),
                    triple(var(statement), end, PatternTerm::var(ivar.end_name())),
                ],
                IntervalSource::Value { value } => vec![
                    bind(Expression::term(kb_term(value)), ivar.start_name()),
                    bind(Expression::term(kb_term(value)), ivar.end_name()),
                ],
                IntervalSource::Entity { entity, start, end } => vec![
                    triple(kb_term(entity), start, PatternTerm::var(ivar.start_name())),
                    triple(kb_term(entity), end, PatternTerm::var(ivar.end_name())),
                ],
            },
            KbPredicate::Now { ivar } => vec![
                bind(Expression::Now, ivar.start_name()),
                bind(Expression::Now, ivar.end_name()),
            ],
            KbPredicate::Date { ivar, date } => {
                let lit = Literal::date(date.year(), date.month(), date.day())
                    .expect("calendar dates are valid");
                vec![
                    bind(
                        Expression::term(PatternTerm::literal(lit.clone())),
                        ivar.start_name(),
                    ),
                    bind(Expression::term(PatternTerm::literal(lit)), ivar.end_name()),
                ]
            }
            KbPredicate::Teenager {
                ivar,
                person,
                birth_property,
                birth_var,
            } => {
                let plus = |years: i64| {
                    Expression::add(
                        Expression::term(var(birth_var)),
                        Expression::term(PatternTerm::literal(Literal::Duration(Duration::years(
                            years,
                        )))),
                    )
                };
                vec![
                    triple(kb_term(person), birth_property, var(birth_var)),
                    bind(plus(13), ivar.start_name()),
                    bind(plus(19), ivar.end_name()),
                ]
            }
            KbPredicate::Overlap { left, right } => {
                vec![filter(interval_relation(IntervalRelation::Overlap, left, right))]
            }
            KbPredicate::Before { left, right } => {
                vec![filter(interval_relation(IntervalRelation::Before, left, right))]
            }
            KbPredicate::After { left, right } => {
                vec![filter(interval_relation(IntervalRelation::After, left, right))]
            }
            KbPredicate::Cmp { left, right, op } => {
                let op = match op {
                    CmpOp::Greater => CompareOp::Gt,
                    CmpOp::Less => CompareOp::Lt,
                };
                vec![filter(Expression::compare(
                    op,
                    Expression::term(var(left)),
                    Expression::term(var(right)),
                ))]
            }
            KbPredicate::Coordinate { .. } => {
                return Err(EmitError::UnemittableConstruct {
                    construct: "coordinate".into(),
                })
            }
            KbPredicate::South { .. } => {
                return Err(EmitError::UnemittableConstruct {
                    construct: "south".into(),
                })
            }
        })
    }
}
