//! Reference evaluator: UNIONs are distributed into disjuncts and each
//! disjunct is answered by enumerating assignments of its pattern variables
//! over every term in the store. Slow by design; meant for cross-checking.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};

use super::eval::{check, finish, Binding, EvalError, QueryResult};
use super::expr::{eval_expr, filter_holds};
use super::TripleStore;
use crate::sparql::{Element, Expression, PatternTerm, SparqlQuery, TriplePattern};

#[derive(Debug, Clone)]
enum Step {
    Triple(TriplePattern),
    Bind(Expression, String),
    /// A filter together with the variables in scope where it applies.
    Filter(Expression, BTreeSet<String>),
}

fn in_scope(steps: &[Step]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in steps {
        match s {
            Step::Triple(t) => out.extend(t.vars().map(str::to_string)),
            Step::Bind(_, v) => {
                out.insert(v.clone());
            }
            Step::Filter(..) => {}
        }
    }
    out
}

fn disjuncts(elements: &[Element], prefix: Vec<Step>) -> Vec<Vec<Step>> {
    let mut seqs = vec![prefix];
    let mut filters = Vec::new();
    for e in elements {
        match e {
            Element::Triple(t) => seqs
                .iter_mut()
                .for_each(|s| s.push(Step::Triple(t.clone()))),
            Element::Bind { expr, var } => seqs
                .iter_mut()
                .for_each(|s| s.push(Step::Bind(expr.clone(), var.clone()))),
            Element::Filter { expr } => filters.push(expr.clone()),
            Element::Union { branches } => {
                seqs = seqs
                    .into_iter()
                    .flat_map(|s| {
                        branches
                            .iter()
                            .flat_map(move |b| disjuncts(b, s.clone()))
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
        }
    }
    for s in &mut seqs {
        let scope = in_scope(s);
        for f in &filters {
            s.push(Step::Filter(f.clone(), scope.clone()));
        }
    }
    seqs
}

/// Same contract as [`super::eval`].
pub fn eval_bruteforce(
    q: &SparqlQuery,
    store: &TripleStore,
    now: DateTime<Utc>,
) -> Result<QueryResult, EvalError> {
    check(q)?;
    let mut sols = Vec::new();
    for seq in disjuncts(&q.where_clause, Vec::new()) {
        let mut vars: Vec<String> = Vec::new();
        for s in &seq {
            if let Step::Triple(t) = s {
                for v in t.vars() {
                    if !vars.iter().any(|x| x == v) {
                        vars.push(v.to_string());
                    }
                }
            }
        }
        // Each triple is checked as soon as its last variable is assigned;
        // a pruned prefix stands for every completion of it.
        let mut ready: Vec<Vec<[Slot; 3]>> = vec![Vec::new(); vars.len() + 1];
        for s in &seq {
            if let Step::Triple(t) = s {
                let slots = [&t.subject, &t.predicate, &t.object].map(|p| match p {
                    PatternTerm::Var(v) => Slot::Var(vars.iter().position(|x| x == v).expect("collected")),
                    PatternTerm::Term(c) => Slot::Const(store.term_id(c)),
                });
                let last = slots.iter().filter_map(|s| match s {
                    Slot::Var(i) => Some(i + 1),
                    Slot::Const(_) => None,
                });
                ready[last.max().unwrap_or(0)].push(slots);
            }
        }
        let ctx = Ctx {
            seq: &seq,
            vars: &vars,
            ready: &ready,
            store,
            now,
        };
        let mut assignment = Vec::with_capacity(vars.len());
        if ctx.holds(0, &assignment) {
            ctx.enumerate(&mut assignment, &mut sols);
        }
    }
    Ok(finish(q, sols))
}

/// A triple position: an enumerated variable or a constant, which has no
/// id when the store does not mention it.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(Option<usize>),
}

struct Ctx<'a> {
    seq: &'a [Step],
    vars: &'a [String],
    ready: &'a [Vec<[Slot; 3]>],
    store: &'a TripleStore,
    now: DateTime<Utc>,
}

impl Ctx<'_> {
    fn holds(&self, level: usize, values: &[usize]) -> bool {
        self.ready[level].iter().all(|slots| {
            let mut ids = [0; 3];
            for (k, s) in slots.iter().enumerate() {
                ids[k] = match s {
                    Slot::Var(i) => values[*i],
                    Slot::Const(Some(id)) => *id,
                    Slot::Const(None) => return false,
                };
            }
            self.store.contains_ids(ids)
        })
    }

    fn enumerate(&self, assignment: &mut Vec<usize>, out: &mut Vec<Binding>) {
        if assignment.len() == self.vars.len() {
            if let Some(b) = self.accept(assignment) {
                out.push(b);
            }
            return;
        }
        for id in 0..self.store.terms().len() {
            assignment.push(id);
            if self.holds(assignment.len(), assignment) {
                self.enumerate(assignment, out);
            }
            assignment.pop();
        }
    }

    fn accept(&self, values: &[usize]) -> Option<Binding> {
        let (seq, vars, now) = (self.seq, self.vars, self.now);
        let terms = self.store.terms();
        // Expressions only see what is bound by the steps before them.
        let mut full: Binding = vars.iter().cloned().zip(values.iter().map(|&i| terms[i].clone())).collect();
        let mut visible: BTreeSet<String> = BTreeSet::new();
        for s in seq {
            match s {
                Step::Triple(t) => visible.extend(t.vars().map(str::to_string)),
                Step::Bind(expr, var) => {
                    let view = |n: &str| {
                        if visible.contains(n) {
                            full.get(n)
                        } else {
                            None
                        }
                    };
                    if let Ok(v) = eval_expr(expr, &view, now) {
                        full.insert(var.clone(), v);
                    }
                    visible.insert(var.clone());
                }
                Step::Filter(expr, scope) => {
                    let view = |n: &str| if scope.contains(n) { full.get(n) } else { None };
                    if !filter_holds(expr, &view, now) {
                        return None;
                    }
                }
            }
        }
        Some(full)
    }
}
