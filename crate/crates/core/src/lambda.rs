//! Lambda-calculus intermediate representation.
//!
//! [`Expr`] is generic over its atom type: [`LambdaExpr`] holds KB-agnostic
//! [`Predicate`]s, while the grounded form in [`crate::ground`] reuses the same
//! algebra with KB predicates. Variables that are neither projected nor
//! sorted on are declared in an abstraction's `exists` list, so a well-formed
//! expression has no free variables at all.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::penman::Number;

/// Ordinary (entity/value/event) variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(is_var_name(&name), "bad variable name {name:?}");
        Var(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Interval variable; it denotes a `[start, end]` pair whose SPARQL
/// accessors are `?<name>Start` and `?<name>End`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalVar(String);

impl IntervalVar {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(is_var_name(&name), "bad interval variable name {name:?}");
        IntervalVar(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn start_name(&self) -> String {
        format!("{}Start", self.0)
    }

    pub fn end_name(&self) -> String {
        format!("{}End", self.0)
    }
}

impl fmt::Display for IntervalVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binder {
    Var(Var),
    Interval(IntervalVar),
}

impl Binder {
    pub fn name(&self) -> &str {
        match self {
            Binder::Var(v) => v.as_str(),
            Binder::Interval(i) => i.as_str(),
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, Binder::Interval(_))
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<Var> for Binder {
    fn from(v: Var) -> Self {
        Binder::Var(v)
    }
}

impl From<IntervalVar> for Binder {
    fn from(v: IntervalVar) -> Self {
        Binder::Interval(v)
    }
}

/// Proleptic Gregorian calendar date, serialized as `yyyy-mm-dd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CalendarDate(NaiveDate);

impl CalendarDate {
    pub fn new(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(CalendarDate)
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    pub fn naive(&self) -> NaiveDate {
        self.0
    }
}

impl TryFrom<String> for CalendarDate {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        NaiveDate::parse_from_str(&s, "%Y-%m-%d")
            .map(CalendarDate)
            .map_err(|e| format!("bad date `{s}`: {e}"))
    }
}

impl From<CalendarDate> for String {
    fn from(d: CalendarDate) -> String {
        d.0.format("%Y-%m-%d").to_string()
    }
}

/// Argument of a KB-agnostic predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Var(Var),
    /// Entity mention to be linked; the surface form, e.g. `"Titanic"`.
    Const(String),
    Number(Number),
}

impl Operand {
    pub fn var(&self) -> Option<&Var> {
        match self {
            Operand::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "{v}"),
            Operand::Const(c) => write!(f, "{c:?}"),
            Operand::Number(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameArg {
    pub role: String,
    pub value: Operand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<")]
    Less,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Greater => ">",
            CmpOp::Less => "<",
        }
    }
}

/// KB-agnostic predicate inventory.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "pred", rename_all = "snake_case")]
pub enum Predicate {
    /// `frame(v, v0, …, vn)`. `instance` is the frame's own node variable;
    /// role-relation predicates built from non-frame nodes have none.
    Frame {
        name: String,
        instance: Option<Var>,
        args: Vec<FrameArg>,
    },
    Interval {
        ivar: IntervalVar,
        source: Operand,
    },
    Now {
        ivar: IntervalVar,
    },
    Teenager {
        ivar: IntervalVar,
        person: Operand,
    },
    Date {
        ivar: IntervalVar,
        date: CalendarDate,
    },
    Overlap {
        left: IntervalVar,
        right: IntervalVar,
    },
    Before {
        left: IntervalVar,
        right: IntervalVar,
    },
    After {
        left: IntervalVar,
        right: IntervalVar,
    },
    Cmp {
        left: Var,
        right: Var,
        op: CmpOp,
    },
    Coordinate {
        cvar: Var,
        source: Operand,
    },
    South {
        left: Var,
        right: Var,
    },
}

/// What the generic algebra needs from an atom.
pub trait Atom {
    /// Every variable the atom mentions, in order of appearance.
    fn binders(&self) -> Vec<Binder>;
    fn pretty(&self) -> String;
}

impl Atom for Predicate {
    fn binders(&self) -> Vec<Binder> {
        fn op(o: &Operand, out: &mut Vec<Binder>) {
            if let Operand::Var(v) = o {
                out.push(Binder::Var(v.clone()));
            }
        }
        let mut out = Vec::new();
        match self {
            Predicate::Frame { instance, args, .. } => {
                if let Some(v) = instance {
                    out.push(Binder::Var(v.clone()));
                }
                for a in args {
                    op(&a.value, &mut out);
                }
            }
            Predicate::Interval { ivar, source } => {
                out.push(ivar.clone().into());
                op(source, &mut out);
            }
            Predicate::Now { ivar } | Predicate::Date { ivar, .. } => out.push(ivar.clone().into()),
            Predicate::Teenager { ivar, person } => {
                out.push(ivar.clone().into());
                op(person, &mut out);
            }
            Predicate::Overlap { left, right }
            | Predicate::Before { left, right }
            | Predicate::After { left, right } => {
                out.push(left.clone().into());
                out.push(right.clone().into());
            }
            Predicate::Cmp { left, right, .. } | Predicate::South { left, right } => {
                out.push(left.clone().into());
                out.push(right.clone().into());
            }
            Predicate::Coordinate { cvar, source } => {
                out.push(cvar.clone().into());
                op(source, &mut out);
            }
        }
        out
    }

    fn pretty(&self) -> String {
        match self {
            Predicate::Frame {
                name,
                instance,
                args,
            } => {
                let mut parts: Vec<String> = instance.iter().map(|v| v.to_string()).collect();
                let positional = args
                    .iter()
                    .enumerate()
                    .all(|(i, a)| a.role.eq_ignore_ascii_case(&format!("arg{i}")));
                for a in args {
                    if positional {
                        parts.push(a.value.to_string());
                    } else {
                        parts.push(format!(":{} {}", a.role, a.value));
                    }
                }
                format!("{name}({})", parts.join(", "))
            }
            Predicate::Interval { ivar, source } => format!("interval({ivar}, {source})"),
            Predicate::Now { ivar } => format!("interval({ivar}, now())"),
            Predicate::Teenager { ivar, person } => format!("teenager({ivar}, {person})"),
            Predicate::Date { ivar, date } => format!(
                "interval({ivar}, date(\"{:02}-{:02}-{:04}\"))",
                date.day(),
                date.month(),
                date.year()
            ),
            Predicate::Overlap { left, right } => format!("overlap({left}, {right})"),
            Predicate::Before { left, right } => format!("before({left}, {right})"),
            Predicate::After { left, right } => format!("after({left}, {right})"),
            Predicate::Cmp { left, right, op } => format!("cmp({left}, {right}, {})", op.symbol()),
            Predicate::Coordinate { cvar, source } => format!("coordinate({cvar}, {source})"),
            Predicate::South { left, right } => format!("south({left}, {right})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connective {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermChild<P> {
    Pred(P),
    Term(Term<P>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term<P> {
    pub connective: Connective,
    pub children: Vec<TermChild<P>>,
}

impl<P> Term<P> {
    pub fn and(preds: impl IntoIterator<Item = P>) -> Self {
        Term {
            connective: Connective::And,
            children: preds.into_iter().map(TermChild::Pred).collect(),
        }
    }

    pub fn or(children: Vec<TermChild<P>>) -> Self {
        Term {
            connective: Connective::Or,
            children,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    /// Every atom in the term, depth first.
    pub fn atoms(&self) -> Vec<&P> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a P>) {
        for c in &self.children {
            match c {
                TermChild::Pred(p) => out.push(p),
                TermChild::Term(t) => t.collect_atoms(out),
            }
        }
    }

    /// Structure-preserving map over atoms.
    pub fn try_map<Q, E>(&self, f: &mut impl FnMut(&P) -> Result<Vec<Q>, E>) -> Result<Term<Q>, E> {
        let mut children = Vec::with_capacity(self.children.len());
        for c in &self.children {
            match c {
                TermChild::Pred(p) => {
                    let mapped = f(p)?;
                    if self.connective == Connective::Or && mapped.len() != 1 {
                        children.push(TermChild::Term(Term::and(mapped)));
                    } else {
                        children.extend(mapped.into_iter().map(TermChild::Pred));
                    }
                }
                TermChild::Term(t) => children.push(TermChild::Term(t.try_map(f)?)),
            }
        }
        Ok(Term {
            connective: self.connective,
            children,
        })
    }
}

impl<P: Atom> Term<P> {
    pub fn binders(&self) -> BTreeSet<Binder> {
        self.atoms().into_iter().flat_map(|a| a.binders()).collect()
    }

    fn pretty(&self) -> String {
        let sep = match self.connective {
            Connective::And => " ∧ ",
            Connective::Or => " ∨ ",
        };
        if self.children.is_empty() {
            return "⊤".to_string();
        }
        self.children
            .iter()
            .map(|c| match c {
                TermChild::Pred(p) => p.pretty(),
                TermChild::Term(t) => format!("({})", t.pretty()),
            })
            .collect::<Vec<_>>()
            .join(sep)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Abstraction<P> {
    pub bound: Vec<Binder>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exists: Vec<Binder>,
    pub body: Term<P>,
}

impl<P: Atom> Abstraction<P> {
    /// Abstraction whose `exists` list is every body variable not in `bound`,
    /// minus those in `outer` (already in scope).
    pub fn closed(bound: Vec<Binder>, body: Term<P>, outer: &BTreeSet<Binder>) -> Self {
        let exists = ordered_binders(&body)
            .into_iter()
            .filter(|b| !bound.contains(b) && !outer.contains(b))
            .collect();
        Abstraction {
            bound,
            exists,
            body,
        }
    }

    fn scope(&self) -> BTreeSet<Binder> {
        self.bound.iter().chain(&self.exists).cloned().collect()
    }

    fn free(&self) -> BTreeSet<Binder> {
        let scope = self.scope();
        self.body
            .binders()
            .into_iter()
            .filter(|b| !scope.contains(b))
            .collect()
    }

    fn pretty(&self) -> String {
        let binders: String = self.bound.iter().map(|b| format!("λ{b}.")).collect();
        format!("{binders} {}", self.body.pretty())
    }
}

/// Body variables in first-occurrence order.
pub(crate) fn ordered_binders<P: Atom>(body: &Term<P>) -> Vec<Binder> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in body.atoms() {
        for b in a.binders() {
            if seen.insert(b.clone()) {
                out.push(b);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Expr<P> {
    Abstraction(Abstraction<P>),
    Count(Abstraction<P>),
    Min {
        inner: Abstraction<P>,
        offset: u64,
        limit: u64,
    },
    Max {
        inner: Abstraction<P>,
        offset: u64,
        limit: u64,
    },
    #[serde(rename = "argmin")]
    ArgMin {
        target: Abstraction<P>,
        key: Abstraction<P>,
        offset: u64,
        limit: u64,
    },
    #[serde(rename = "argmax")]
    ArgMax {
        target: Abstraction<P>,
        key: Abstraction<P>,
        offset: u64,
        limit: u64,
    },
    #[serde(rename = "boolean")]
    BooleanQuery {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        exists: Vec<Binder>,
        body: Term<P>,
    },
}

pub type LambdaExpr = Expr<Predicate>;

impl<P> Expr<P> {
    /// Projected binders (empty for boolean questions).
    pub fn projection(&self) -> &[Binder] {
        match self {
            Expr::Abstraction(a) | Expr::Count(a) => &a.bound,
            Expr::Min { inner, .. } | Expr::Max { inner, .. } => &inner.bound,
            Expr::ArgMin { target, .. } | Expr::ArgMax { target, .. } => &target.bound,
            Expr::BooleanQuery { .. } => &[],
        }
    }

    /// Every term in the expression, outermost first.
    pub fn terms(&self) -> Vec<&Term<P>> {
        match self {
            Expr::Abstraction(a) | Expr::Count(a) => vec![&a.body],
            Expr::Min { inner, .. } | Expr::Max { inner, .. } => vec![&inner.body],
            Expr::ArgMin { target, key, .. } | Expr::ArgMax { target, key, .. } => {
                vec![&target.body, &key.body]
            }
            Expr::BooleanQuery { body, .. } => vec![body],
        }
    }
}

impl<P: Atom> Expr<P> {
    pub fn free_vars(&self) -> BTreeSet<Binder> {
        match self {
            Expr::Abstraction(a) | Expr::Count(a) => a.free(),
            Expr::Min { inner, .. } | Expr::Max { inner, .. } => inner.free(),
            Expr::ArgMin { target, key, .. } | Expr::ArgMax { target, key, .. } => {
                let outer = target.scope();
                let mut fv = target.free();
                fv.extend(key.free().into_iter().filter(|b| !outer.contains(b)));
                fv
            }
            Expr::BooleanQuery { exists, body } => body
                .binders()
                .into_iter()
                .filter(|b| !exists.contains(b))
                .collect(),
        }
    }

    /// Every invariant violation, each with a path into the expression.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut v = Validator::default();
        match self {
            Expr::Abstraction(a) => v.abstraction("$", a, &BTreeSet::new(), false),
            Expr::Count(a) => {
                v.abstraction("$.inner", a, &BTreeSet::new(), false);
                v.single_binder("$.inner", a);
            }
            Expr::Min { inner, limit, .. } | Expr::Max { inner, limit, .. } => {
                v.abstraction("$.inner", inner, &BTreeSet::new(), false);
                v.single_binder("$.inner", inner);
                v.limit(*limit);
            }
            Expr::ArgMin {
                target, key, limit, ..
            }
            | Expr::ArgMax {
                target, key, limit, ..
            } => {
                v.abstraction("$.target", target, &BTreeSet::new(), false);
                v.single_binder("$.target", target);
                let outer = target.scope();
                v.abstraction("$.key", key, &outer, true);
                if key.bound.len() != 2 {
                    v.push(
                        "$.key.bound",
                        "key must bind the target variable plus one sort variable",
                    );
                } else if target.bound.first() != Some(&key.bound[0]) {
                    v.push("$.key.bound[0]", "key binds wrong target var");
                }
                v.limit(*limit);
            }
            Expr::BooleanQuery { exists, body } => {
                v.term("$.body", body, false);
                v.scope("$", &[], exists, body, &BTreeSet::new());
            }
        }
        v.kinds(self);
        if v.violations.is_empty() {
            Ok(())
        } else {
            Err(v.violations)
        }
    }

    /// Text rendering close to the usual notation, e.g.
    /// `argmax(λa. T1, λa.λev. T2, 0, 1)`.
    pub fn pretty(&self) -> String {
        match self {
            Expr::Abstraction(a) => a.pretty(),
            Expr::Count(a) => format!("count({})", a.pretty()),
            Expr::Min {
                inner,
                offset,
                limit,
            } => format!("min({}, {offset}, {limit})", inner.pretty()),
            Expr::Max {
                inner,
                offset,
                limit,
            } => format!("max({}, {offset}, {limit})", inner.pretty()),
            Expr::ArgMin {
                target,
                key,
                offset,
                limit,
            } => format!(
                "argmin({}, {}, {offset}, {limit})",
                target.pretty(),
                key.pretty()
            ),
            Expr::ArgMax {
                target,
                key,
                offset,
                limit,
            } => format!(
                "argmax({}, {}, {offset}, {limit})",
                target.pretty(),
                key.pretty()
            ),
            Expr::BooleanQuery { body, .. } => format!("ask({})", body.pretty()),
        }
    }
}

impl<P: Atom> fmt::Display for Expr<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

pub fn free_vars<P: Atom>(e: &Expr<P>) -> BTreeSet<Binder> {
    e.free_vars()
}

pub fn validate<P: Atom>(e: &Expr<P>) -> Result<(), Vec<Violation>> {
    e.validate()
}

pub fn pretty<P: Atom>(e: &Expr<P>) -> String {
    e.pretty()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Default)]
struct Validator {
    violations: Vec<Violation>,
}

impl Validator {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn limit(&mut self, limit: u64) {
        if limit == 0 {
            self.push("$.limit", "limit must be positive");
        }
    }

    fn single_binder<P>(&mut self, path: &str, a: &Abstraction<P>) {
        if a.bound.len() != 1 {
            self.push(&format!("{path}.bound"), "must bind exactly one variable");
        }
    }

    fn term<P: Atom>(&mut self, path: &str, t: &Term<P>, allow_empty: bool) {
        if t.children.is_empty() && !allow_empty {
            self.push(path, "empty term");
        }
        for (i, c) in t.children.iter().enumerate() {
            if let TermChild::Term(inner) = c {
                self.term(&format!("{path}[{i}]"), inner, false);
            }
        }
    }

    fn abstraction<P: Atom>(
        &mut self,
        path: &str,
        a: &Abstraction<P>,
        outer: &BTreeSet<Binder>,
        key: bool,
    ) {
        if a.bound.is_empty() {
            self.push(&format!("{path}.bound"), "abstraction binds no variable");
        }
        self.term(&format!("{path}.body"), &a.body, key);
        self.scope(path, &a.bound, &a.exists, &a.body, outer);
    }

    fn scope<P: Atom>(
        &mut self,
        path: &str,
        bound: &[Binder],
        exists: &[Binder],
        body: &Term<P>,
        outer: &BTreeSet<Binder>,
    ) {
        let mut declared = BTreeSet::new();
        for b in bound.iter().chain(exists) {
            if !declared.insert(b.clone()) {
                self.push(path, format!("`{b}` is declared twice"));
            }
        }
        let used = body.binders();
        for b in &used {
            if !declared.contains(b) && !outer.contains(b) {
                self.push(&format!("{path}.body"), format!("unbound variable `{b}`"));
            }
        }
        for b in exists {
            if !used.contains(b) {
                self.push(
                    &format!("{path}.exists"),
                    format!("existential `{b}` does not occur"),
                );
            }
        }
    }

    fn kinds<P: Atom>(&mut self, e: &Expr<P>) {
        let mut kinds: BTreeMap<String, bool> = BTreeMap::new();
        let mut all: Vec<Binder> = e.projection().to_vec();
        for t in e.terms() {
            all.extend(t.binders());
        }
        let mut intervals = BTreeSet::new();
        for b in &all {
            if let Some(&prev) = kinds.get(b.name()) {
                if prev != b.is_interval() {
                    self.push(
                        "$",
                        format!("`{}` used both as interval and ordinary variable", b.name()),
                    );
                }
            }
            kinds.insert(b.name().to_string(), b.is_interval());
            if let Binder::Interval(i) = b {
                intervals.insert(i.clone());
            }
        }
        let mut accessors = BTreeSet::new();
        for i in &intervals {
            for name in [i.start_name(), i.end_name()] {
                if kinds.contains_key(&name) || !accessors.insert(name.clone()) {
                    self.push(
                        "$",
                        format!("interval accessor `?{name}` clashes with another variable"),
                    );
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Var {
        Var::new(s)
    }
    fn iv(s: &str) -> IntervalVar {
        IntervalVar::new(s)
    }
    fn frame(name: &str, inst: &str, args: &[&str]) -> Predicate {
        Predicate::Frame {
            name: name.into(),
            instance: Some(v(inst)),
            args: args
                .iter()
                .enumerate()
                .map(|(i, a)| FrameArg {
                    role: format!("arg{i}"),
                    value: Operand::Var(v(a)),
                })
                .collect(),
        }
    }

    #[test]
    fn free_vars_of_open_abstraction() {
        let e = LambdaExpr::Abstraction(Abstraction {
            bound: vec![v("a").into()],
            exists: vec![],
            body: Term::and([frame("direct-01", "v", &["a", "m"])]),
        });
        let fv: Vec<String> = e.free_vars().iter().map(|b| b.to_string()).collect();
        assert_eq!(fv, vec!["m", "v"]);
        assert!(e.validate().is_err());
    }

    #[test]
    fn closed_expression_has_no_free_vars() {
        let body = Term::and([frame("direct-01", "v", &["a", "m"])]);
        let e = LambdaExpr::Abstraction(Abstraction::closed(
            vec![v("a").into()],
            body,
            &BTreeSet::new(),
        ));
        assert!(e.free_vars().is_empty());
        assert_eq!(e.validate(), Ok(()));
    }

    fn before_rule_output() -> LambdaExpr {
        let target = Abstraction::closed(
            vec![v("a").into()],
            Term::and([frame("play-01", "v", &["a"])]),
            &BTreeSet::new(),
        );
        let key_body = Term::and([
            frame("win-01", "n", &["x"]),
            Predicate::Interval {
                ivar: iv("ev"),
                source: Operand::Var(v("v")),
            },
            Predicate::Interval {
                ivar: iv("en"),
                source: Operand::Var(v("n")),
            },
            Predicate::Before {
                left: iv("ev"),
                right: iv("en"),
            },
        ]);
        let outer: BTreeSet<Binder> = target.bound.iter().chain(&target.exists).cloned().collect();
        let key = Abstraction::closed(vec![v("a").into(), iv("ev").into()], key_body, &outer);
        LambdaExpr::ArgMax {
            target,
            key,
            offset: 0,
            limit: 1,
        }
    }

    #[test]
    fn argmax_before_shape_is_closed() {
        let e = before_rule_output();
        assert!(e.free_vars().is_empty());
        assert_eq!(e.validate(), Ok(()));
        assert_eq!(
            e.pretty(),
            "argmax(λa. play-01(v, a), λa.λev. win-01(n, x) ∧ interval(ev, v) ∧ interval(en, n) ∧ before(ev, en), 0, 1)"
        );
    }

    #[test]
    fn key_binding_wrong_target_is_reported() {
        let mut e = before_rule_output();
        if let LambdaExpr::ArgMax { key, .. } = &mut e {
            key.bound[0] = v("zz").into();
        }
        let errs = e.validate().unwrap_err();
        assert!(
            errs.iter()
                .any(|x| x.message == "key binds wrong target var"),
            "{errs:?}"
        );
    }

    #[test]
    fn empty_term_is_reported() {
        let e = LambdaExpr::Abstraction(Abstraction {
            bound: vec![v("a").into()],
            exists: vec![],
            body: Term::and([]),
        });
        let errs = e.validate().unwrap_err();
        assert!(errs
            .iter()
            .any(|x| x.message == "empty term" && x.path == "$.body"));
    }

    #[test]
    fn count_pretty() {
        let e = LambdaExpr::Count(Abstraction {
            bound: vec![v("v0").into()],
            exists: vec![v("v").into()],
            body: Term::and([frame("frame", "v", &["v0"])]),
        });
        assert_eq!(e.validate(), Ok(()));
        assert_eq!(e.pretty(), "count(λv0. frame(v, v0))");
    }

    #[test]
    fn mixed_kind_and_accessor_clash() {
        let e = LambdaExpr::BooleanQuery {
            exists: vec![v("ev").into(), iv("ev").into(), v("v").into()],
            body: Term::and([frame("f", "v", &["ev"]), Predicate::Now { ivar: iv("ev") }]),
        };
        let errs = e.validate().unwrap_err();
        assert!(errs.iter().any(|x| x.message.contains("both as interval")));

        let e = LambdaExpr::BooleanQuery {
            exists: vec![v("enStart").into(), iv("en").into(), v("v").into()],
            body: Term::and([
                frame("f", "v", &["enStart"]),
                Predicate::Now { ivar: iv("en") },
            ]),
        };
        let errs = e.validate().unwrap_err();
        assert!(errs.iter().any(|x| x.message.contains("clashes")));
    }

    #[test]
    fn unused_existential_and_zero_limit() {
        let e = LambdaExpr::Min {
            inner: Abstraction {
                bound: vec![v("a").into()],
                exists: vec![v("q").into(), v("v").into()],
                body: Term::and([frame("f", "v", &["a"])]),
            },
            offset: 0,
            limit: 0,
        };
        let errs = e.validate().unwrap_err();
        assert_eq!(errs.len(), 2, "{errs:?}");
    }

    #[test]
    fn pretty_is_deterministic_and_quotes_constants() {
        let p = Predicate::Frame {
            name: "release-01".into(),
            instance: Some(v("r")),
            args: vec![FrameArg {
                role: "arg1".into(),
                value: Operand::Const("Titanic".into()),
            }],
        };
        assert_eq!(p.pretty(), "release-01(r, :arg1 \"Titanic\")");
        let d = Predicate::Date {
            ivar: iv("ed"),
            date: CalendarDate::new(1997, 12, 19).unwrap(),
        };
        assert_eq!(d.pretty(), "interval(ed, date(\"19-12-1997\"))");
        assert_eq!(before_rule_output().pretty(), before_rule_output().pretty());
    }

    #[test]
    fn json_tagging() {
        let e = before_rule_output();
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["type"], "argmax");
        assert_eq!(json["key"]["bound"][1]["interval"], "ev");
        let back: LambdaExpr = serde_json::from_value(json).unwrap();
        assert_eq!(back, e);
    }
}
