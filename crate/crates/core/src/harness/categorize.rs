//! Complexity label of a query from its temporal structure.
//!
//! An interval is either a subject carrying a start-time property (a
//! qualifier or a direct property) or a group of two or more BINDs
//! computed from the same source. A temporal filter compares at least one
//! interval endpoint.

use std::collections::{BTreeMap, BTreeSet};

use super::dataset::Category;
use crate::sparql::{CompareOp, Element, Expression, PatternTerm, Projection, SparqlQuery};

const START_LOCALS: [&str; 3] = ["P580", "P585", "startDate"];
const END_LOCALS: [&str; 2] = ["P582", "endDate"];

fn local_name(t: &PatternTerm) -> Option<&str> {
    match t {
        PatternTerm::Term(crate::rdf::RdfTerm::Iri(i)) => i.as_str().rsplit(['/', '#']).next(),
        _ => None,
    }
}

#[derive(Default)]
struct Scan {
    /// Subjects that carry a start or point-in-time property.
    anchored: BTreeSet<String>,
    endpoints: BTreeSet<String>,
    /// BIND groups keyed by the variables (and `now`) they read.
    bind_groups: BTreeMap<String, Vec<String>>,
    duration_arith: bool,
    filters: Vec<Expression>,
}

fn expr_key(e: &Expression) -> String {
    let mut vars: Vec<&str> = e.vars().into_iter().collect();
    if contains_now(e) {
        vars.push("now()");
    }
    if vars.is_empty() {
        // Constant dates form one interval per constant.
        return format!("{e:?}");
    }
    vars.join(",")
}

fn contains_now(e: &Expression) -> bool {
    match e {
        Expression::Now => true,
        Expression::Term { .. } | Expression::Bound { .. } => false,
        Expression::Not { inner } => contains_now(inner),
        Expression::Add { left, right }
        | Expression::Sub { left, right }
        | Expression::Compare { left, right, .. }
        | Expression::And { left, right }
        | Expression::Or { left, right } => contains_now(left) || contains_now(right),
    }
}

fn is_arith(e: &Expression) -> bool {
    matches!(e, Expression::Add { .. } | Expression::Sub { .. })
}

impl Scan {
    fn group(&mut self, elements: &[Element]) {
        for e in elements {
            match e {
                Element::Triple(t) => {
                    let local = local_name(&t.predicate);
                    let subject = match &t.subject {
                        PatternTerm::Var(v) => format!("?{v}"),
                        PatternTerm::Term(x) => x.canonical(),
                    };
                    if local.is_some_and(|l| START_LOCALS.contains(&l)) {
                        self.anchored.insert(subject);
                        self.endpoints.extend(t.object.as_var().map(str::to_string));
                    } else if local.is_some_and(|l| END_LOCALS.contains(&l)) {
                        self.endpoints.extend(t.object.as_var().map(str::to_string));
                    }
                }
                Element::Bind { expr, var } => {
                    self.duration_arith |= is_arith(expr);
                    self.bind_groups.entry(expr_key(expr)).or_default().push(var.clone());
                }
                Element::Filter { expr } => self.filters.push(expr.clone()),
                Element::Union { branches } => branches.iter().for_each(|b| self.group(b)),
            }
        }
    }

    fn interval_count(&mut self) -> usize {
        let mut n = self.anchored.len();
        for (key, targets) in &self.bind_groups {
            // A pair of BINDs from a start-time variable is a copy of an
            // interval already counted.
            let copies_anchor = key.split(',').all(|v| self.endpoints.contains(v));
            if targets.len() >= 2 && !copies_anchor {
                n += 1;
                self.endpoints.extend(targets.iter().cloned());
            }
        }
        n
    }
}

fn temporal_comparisons(e: &Expression, endpoints: &BTreeSet<String>) -> usize {
    match e {
        Expression::Compare { op, left, right } if *op != CompareOp::Eq && *op != CompareOp::Ne => {
            let touches = left.vars().into_iter().chain(right.vars()).any(|v| endpoints.contains(v));
            usize::from(touches)
        }
        Expression::And { left, right } | Expression::Or { left, right } => {
            temporal_comparisons(left, endpoints) + temporal_comparisons(right, endpoints)
        }
        Expression::Not { inner } => temporal_comparisons(inner, endpoints),
        _ => 0,
    }
}

pub fn categorize(q: &SparqlQuery) -> Category {
    let mut scan = Scan::default();
    scan.group(&q.where_clause);
    let intervals = scan.interval_count();
    let temporal_filters = scan
        .filters
        .iter()
        .filter(|f| temporal_comparisons(f, &scan.endpoints) > 0)
        .count();
    let aggregate = q.order_by.is_some() || matches!(q.projection, Projection::Count { .. });
    let extra_reasoning = scan.duration_arith || aggregate || temporal_filters > 1 || intervals > 2;
    if intervals >= 2 && extra_reasoning {
        Category::Complex
    } else if (intervals >= 2 && temporal_filters > 0) || (intervals >= 1 && (aggregate || temporal_filters > 0)) {
        Category::Medium
    } else {
        Category::Simple
    }
}
