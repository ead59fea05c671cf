//! Scalar expression semantics shared by the evaluator and the oracle.

use std::cmp::Ordering;

use chrono::{DateTime, Utc};
use ordered_float::OrderedFloat;

use crate::rdf::{Duration, Literal, RdfTerm};
use crate::sparql::{CompareOp, Expression, PatternTerm};

/// An expression error; FILTER treats it as false and BIND leaves its
/// target unbound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ExprError;

pub(crate) fn eval_expr<'a>(
    e: &Expression,
    lookup: &dyn Fn(&str) -> Option<&'a RdfTerm>,
    now: DateTime<Utc>,
) -> Result<RdfTerm, ExprError> {
    match e {
        Expression::Term { term } => match term {
            PatternTerm::Var(v) => lookup(v).cloned().ok_or(ExprError),
            PatternTerm::Term(t) => Ok(t.clone()),
        },
        Expression::Now => Ok(RdfTerm::Literal(Literal::DateTime(now))),
        Expression::Bound { var } => Ok(boolean(lookup(var).is_some())),
        Expression::Add { left, right } => arith(
            &eval_expr(left, lookup, now)?,
            &eval_expr(right, lookup, now)?,
            false,
        ),
        Expression::Sub { left, right } => arith(
            &eval_expr(left, lookup, now)?,
            &eval_expr(right, lookup, now)?,
            true,
        ),
        Expression::Compare { op, left, right } => compare(
            *op,
            &eval_expr(left, lookup, now)?,
            &eval_expr(right, lookup, now)?,
        )
        .map(boolean),
        Expression::Not { inner } => ebv(&eval_expr(inner, lookup, now)?).map(|b| boolean(!b)),
        // Three-valued logic: a definite answer on one side absorbs an error on the other.
        Expression::And { left, right } => {
            let l = eval_expr(left, lookup, now).and_then(|t| ebv(&t));
            let r = eval_expr(right, lookup, now).and_then(|t| ebv(&t));
            match (l, r) {
                (Ok(false), _) | (_, Ok(false)) => Ok(boolean(false)),
                (Ok(true), Ok(true)) => Ok(boolean(true)),
                _ => Err(ExprError),
            }
        }
        Expression::Or { left, right } => {
            let l = eval_expr(left, lookup, now).and_then(|t| ebv(&t));
            let r = eval_expr(right, lookup, now).and_then(|t| ebv(&t));
            match (l, r) {
                (Ok(true), _) | (_, Ok(true)) => Ok(boolean(true)),
                (Ok(false), Ok(false)) => Ok(boolean(false)),
                _ => Err(ExprError),
            }
        }
    }
}

/// True only when the filter evaluates without error to a true value.
pub(crate) fn filter_holds<'a>(
    e: &Expression,
    lookup: &dyn Fn(&str) -> Option<&'a RdfTerm>,
    now: DateTime<Utc>,
) -> bool {
    eval_expr(e, lookup, now).and_then(|t| ebv(&t)) == Ok(true)
}

fn boolean(b: bool) -> RdfTerm {
    RdfTerm::Literal(Literal::Boolean(b))
}

fn ebv(t: &RdfTerm) -> Result<bool, ExprError> {
    match t {
        RdfTerm::Literal(Literal::Boolean(b)) => Ok(*b),
        RdfTerm::Literal(Literal::Integer(i)) => Ok(*i != 0),
        RdfTerm::Literal(Literal::Decimal(x)) => Ok(x.0 != 0.0 && !x.0.is_nan()),
        RdfTerm::Literal(Literal::String(s)) => Ok(!s.is_empty()),
        _ => Err(ExprError),
    }
}

fn arith(l: &RdfTerm, r: &RdfTerm, subtract: bool) -> Result<RdfTerm, ExprError> {
    let (RdfTerm::Literal(l), RdfTerm::Literal(r)) = (l, r) else {
        return Err(ExprError);
    };
    let neg = |d: &Duration| Duration {
        months: -d.months,
        seconds: -d.seconds,
    };
    let out = match (l, r) {
        (Literal::Integer(a), Literal::Integer(b)) => {
            let v = if subtract {
                a.checked_sub(*b)
            } else {
                a.checked_add(*b)
            };
            Literal::Integer(v.ok_or(ExprError)?)
        }
        (Literal::DateTime(t), Literal::Duration(d)) => {
            let d = if subtract { neg(d) } else { *d };
            Literal::DateTime(d.add_to(*t).ok_or(ExprError)?)
        }
        (Literal::Duration(d), Literal::DateTime(t)) if !subtract => {
            Literal::DateTime(d.add_to(*t).ok_or(ExprError)?)
        }
        (a, b) => {
            let (x, y) = (a.numeric().ok_or(ExprError)?, b.numeric().ok_or(ExprError)?);
            Literal::Decimal(OrderedFloat(if subtract { x - y } else { x + y }))
        }
    };
    Ok(RdfTerm::Literal(out))
}

fn compare(op: CompareOp, l: &RdfTerm, r: &RdfTerm) -> Result<bool, ExprError> {
    let ord = match (l, r) {
        (RdfTerm::Literal(a), RdfTerm::Literal(b)) => a.compare(b),
        _ => None,
    };
    match (op, ord) {
        (CompareOp::Eq, Some(o)) => Ok(o == Ordering::Equal),
        (CompareOp::Ne, Some(o)) => Ok(o != Ordering::Equal),
        (CompareOp::Eq, None) => Ok(l == r),
        (CompareOp::Ne, None) => Ok(l != r),
        (_, None) => Err(ExprError),
        (CompareOp::Lt, Some(o)) => Ok(o == Ordering::Less),
        (CompareOp::Le, Some(o)) => Ok(o != Ordering::Greater),
        (CompareOp::Gt, Some(o)) => Ok(o == Ordering::Greater),
        (CompareOp::Ge, Some(o)) => Ok(o != Ordering::Less),
    }
}
