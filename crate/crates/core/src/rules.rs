//! Rule-based translation from AMR graphs to KB-agnostic lambda expressions.
//!
//! The walk starts at the root and visits every node reachable through the
//! edges as written. Frame nodes (concepts with a sense suffix such as
//! `direct-01`) become frame predicates; role edges between non-frame nodes
//! become binary role predicates; named entities become constants. Reasoning
//! constructs (`:time`, `:ord`, `:quant`, `:mod`, `have-quant-91`,
//! `have-degree-91`) are matched by the temporal and numerical rules, most
//! specific family first, and their predicates are appended after the base
//! conjunction in the order each rule prescribes.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lambda::{
    Abstraction, Binder, CalendarDate, CmpOp, FrameArg, IntervalVar, LambdaExpr, Operand,
    Predicate, Term, Var, Violation,
};
use crate::penman::{AmrGraph, Edge, NodeId, NodeTarget, AMR_UNKNOWN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleFamily {
    Temporal,
    Numerical,
    Base,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleId {
    pub family: RuleFamily,
    pub name: String,
}

impl RuleId {
    fn new(family: RuleFamily, name: &str) -> Self {
        RuleId {
            family,
            name: name.to_string(),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// One line of the diagnostic trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedRule {
    pub node: NodeId,
    pub rule: String,
    pub family: RuleFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrdinalOffsetMode {
    /// `:value x` selects OFFSET x-1, so `:value 1` agrees with `:mod first`.
    #[default]
    ZeroBased,
    /// OFFSET x+1, the offset as the ordinal rule is usually written.
    PlusOne,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RuleConfig {
    pub ordinal_offset_mode: OrdinalOffsetMode,
    pub before_concepts: BTreeSet<String>,
    pub after_concepts: BTreeSet<String>,
    pub teenager_concepts: BTreeSet<String>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        RuleConfig {
            ordinal_offset_mode: OrdinalOffsetMode::ZeroBased,
            before_concepts: set(&["before", "prior", "precede", "precede-01"]),
            after_concepts: set(&["after", "subsequent", "follow-01"]),
            teenager_concepts: set(&["teenager"]),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("unsupported construct at `{node}` (`{concept}`): {reason}")]
    UnsupportedConstruct {
        node: NodeId,
        concept: String,
        reason: String,
    },
    #[error("translation produced an invalid expression: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Translation {
    pub expr: LambdaExpr,
    pub applied: Vec<AppliedRule>,
}

impl Translation {
    /// Trace as JSON lines, one record per applied rule.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.applied {
            out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }
}

const WHEN: &str = "temporal.when";
const BEFORE: &str = "temporal.before";
const AFTER: &str = "temporal.after";
const OVERLAP: &str = "temporal.overlap";
const ORDINAL: &str = "temporal.ordinal";
const ORDINAL_LAST: &str = "temporal.ordinal.last";
const NOW: &str = "temporal.now";
const DATE: &str = "temporal.date";
const TEENAGER: &str = "temporal.teenager";
const COUNT: &str = "numerical.count";
const FIRST: &str = "numerical.first";
const LAST: &str = "numerical.last";
const MOST: &str = "numerical.most";
const LEAST: &str = "numerical.least";
const MORE: &str = "numerical.more";
const LESS: &str = "numerical.less";
const FRAME: &str = "base.frame";
const PROJECTION: &str = "base.projection";
const BOOLEAN: &str = "base.boolean";

const INVENTORY: &[(RuleFamily, &str, &str)] = &[
    (RuleFamily::Temporal, WHEN, "(v/frame … :time(a/amr-unknown)) → λev. ψ(v) ∧ interval(ev, v)"),
    (RuleFamily::Temporal, BEFORE, "(v/frame … :time(b/before :op1(n/…))) → argmax(λa. ψ(v), λa.λev. ψ(n) ∧ interval(ev, v) ∧ interval(en, n) ∧ before(ev, en), 0, 1)"),
    (RuleFamily::Temporal, AFTER, "(v/frame … :time(a/after :op1(n/…))) → argmin(λa. ψ(v), λa.λev. ψ(n) ∧ interval(ev, v) ∧ interval(en, n) ∧ after(ev, en), 0, 1)"),
    (RuleFamily::Temporal, OVERLAP, "(v/frame … :time(n/…)) → λa. ψ(v) ∧ ψ(n) ∧ interval(ev, v) ∧ interval(en, n) ∧ overlap(ev, en)"),
    (RuleFamily::Temporal, ORDINAL, "(v/frame … :ord(o/ordinal-entity :value x)), x ≥ 1 → argmin(λa. ψ(v), λa.λev. interval(ev, v), offset(x), 1)"),
    (RuleFamily::Temporal, ORDINAL_LAST, "(v/frame … :ord(o/ordinal-entity :value -1)) → argmax(λa. ψ(v), λa.λev. interval(ev, v), 0, 1)"),
    (RuleFamily::Temporal, NOW, "(v/frame … :time(n/now)) → λa. ψ(v) ∧ interval(ev, v) ∧ interval(en, now()) ∧ overlap(ev, en)"),
    (RuleFamily::Temporal, DATE, "(v/frame … :time(d/date-entity :month mm :day dd :year yyyy)) → λa. ψ(v) ∧ interval(en, date(\"dd-mm-yyyy\")) ∧ interval(ev, v) ∧ overlap(ev, en)"),
    (RuleFamily::Temporal, TEENAGER, "(v/frame … :time(t/teenager :domain(n/…))) → λa. ψ(v) ∧ interval(ev, v) ∧ teenager(en, n) ∧ overlap(ev, en)"),
    (RuleFamily::Numerical, COUNT, "(v/frame :arg0(v0/frame0 :quant(a/amr-unknown)) …) → count(λv0. ψ(v))"),
    (RuleFamily::Numerical, FIRST, "(v/frame :arg0(a/amr-unknown) … :mod(f/first)) → min(λa. ψ(v), 0, 1)"),
    (RuleFamily::Numerical, LAST, "(v/frame :arg0(a/amr-unknown) … :mod(f/last)) → max(λa. ψ(v), 0, 1)"),
    (RuleFamily::Numerical, MOST, "(v/frame :arg0(v0 :mod(a/amr-unknown)) … :argn(vn :arg1-of(h/have-quant-91 :arg3(l/most)))) → argmax(λv0. ψ(v), λv0.λvn. ψ(vn), 0, 1)"),
    (RuleFamily::Numerical, LEAST, "(v/frame :arg0(v0 :mod(a/amr-unknown)) … :argn(vn :arg1-of(h/have-quant-91 :arg3(l/least)))) → argmin(λv0. ψ(v), λv0.λvn. ψ(vn), 0, 1)"),
    (RuleFamily::Numerical, MORE, "(v/frame … :argn(vn :arg1-of(h/have-degree-91 :arg3(m/more) :arg4(vm :arg1-of(n/…))))) → λa. ψ(v) ∧ ψ(n) ∧ cmp(vn, vm, >)"),
    (RuleFamily::Numerical, LESS, "(v/frame … :argn(vn :arg1-of(h/have-degree-91 :arg3(m/less) :arg4(vm :arg1-of(n/…))))) → λa. ψ(v) ∧ ψ(n) ∧ cmp(vn, vm, <)"),
    (RuleFamily::Base, FRAME, "(v/frame :arg0(v0/…) … :argn(vn/…)) → frame(v, v0, …, vn) ∧ ψ(v0) ∧ … ∧ ψ(vn)"),
    (RuleFamily::Base, PROJECTION, "(v/frame … :argi(a/amr-unknown) …) → λa. ψ(v)"),
    (RuleFamily::Base, BOOLEAN, "graph without amr-unknown, or with :polarity(a/amr-unknown) → ask(ψ(root))"),
];

/// Every rule in precedence order with a description of its pattern.
pub fn rule_inventory() -> Vec<(RuleId, String)> {
    INVENTORY
        .iter()
        .map(|(family, name, pattern)| (RuleId::new(*family, name), pattern.to_string()))
        .collect()
}

fn family_of(name: &str) -> RuleFamily {
    INVENTORY
        .iter()
        .find(|(_, n, _)| *n == name)
        .map(|(f, _, _)| *f)
        .expect("rule names come from the inventory")
}

pub fn translate(g: &AmrGraph) -> Result<Translation, TranslateError> {
    translate_with(g, &RuleConfig::default())
}

pub fn translate_with(g: &AmrGraph, cfg: &RuleConfig) -> Result<Translation, TranslateError> {
    Walker::new(g, cfg).run()
}

/// A PropBank-style frame carries a numeric sense suffix (`direct-01`).
fn is_frame(concept: &str) -> bool {
    match concept.rsplit_once('-') {
        Some((stem, sense)) => {
            !stem.is_empty() && !sense.is_empty() && sense.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

fn core_rank(role: &str) -> (u8, u32, String) {
    let lower = role.to_ascii_lowercase();
    match lower
        .strip_prefix("arg")
        .and_then(|n| n.parse::<u32>().ok())
    {
        Some(n) => (0, n, lower),
        None => (1, 0, lower),
    }
}

fn inverse_base(role: &str) -> Option<&str> {
    let n = role.len();
    if n > 3
        && role[n - 3..].eq_ignore_ascii_case("-of")
        && !role.eq_ignore_ascii_case("consist-of")
    {
        Some(&role[..n - 3])
    } else {
        None
    }
}

/// Role labels that never become predicate arguments.
const IGNORED_ROLES: &[&str] = &["wiki", "polarity", "mode"];

#[derive(Debug, Clone)]
enum Wrapper {
    Count,
    Min {
        offset: u64,
        limit: u64,
    },
    Max {
        offset: u64,
        limit: u64,
    },
    ArgMin {
        sort: Binder,
        offset: u64,
        limit: u64,
    },
    ArgMax {
        sort: Binder,
        offset: u64,
        limit: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sink {
    Main,
    Key,
}

/// A matched reasoning construct whose predicates are emitted after the base walk.
#[derive(Debug, Clone)]
enum Deferred {
    When {
        host: NodeId,
    },
    Relation {
        host: NodeId,
        nested: NodeId,
        kind: TemporalRelation,
        sink: Sink,
    },
    Overlap {
        host: NodeId,
        nested: NodeId,
    },
    Now {
        host: NodeId,
        now: NodeId,
    },
    Date {
        host: NodeId,
        node: NodeId,
        date: CalendarDate,
    },
    Teenager {
        host: NodeId,
        domain: NodeId,
    },
    Ordinal {
        host: NodeId,
    },
    Compare {
        left: NodeId,
        right: NodeId,
        op: CmpOp,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TemporalRelation {
    Before,
    After,
}

enum Projection {
    None,
    Node(NodeId),
    Interval(NodeId),
}

struct Walker<'g> {
    g: &'g AmrGraph,
    cfg: &'g RuleConfig,
    visited: HashSet<NodeId>,
    /// Nodes matched by a rule; they are never visited as ordinary nodes.
    consumed: HashSet<NodeId>,
    main: Vec<Predicate>,
    key: Vec<Predicate>,
    sink: Sink,
    applied: Vec<AppliedRule>,
    wrapper: Option<(NodeId, Wrapper)>,
    deferred: VecDeque<Deferred>,
    interval_names: HashMap<NodeId, IntervalVar>,
    taken_names: HashSet<String>,
    first_unknown: Option<NodeId>,
}

impl<'g> Walker<'g> {
    fn new(g: &'g AmrGraph, cfg: &'g RuleConfig) -> Self {
        Walker {
            g,
            cfg,
            visited: HashSet::new(),
            consumed: HashSet::new(),
            main: Vec::new(),
            key: Vec::new(),
            sink: Sink::Main,
            applied: Vec::new(),
            wrapper: None,
            deferred: VecDeque::new(),
            interval_names: HashMap::new(),
            taken_names: g.vars().into_iter().map(str::to_string).collect(),
            first_unknown: g.find_unknowns().into_iter().next(),
        }
    }

    fn concept(&self, id: &NodeId) -> &'g str {
        self.g.concept(id).unwrap_or_default()
    }

    fn concept_is(&self, id: &NodeId, c: &str) -> bool {
        self.concept(id).eq_ignore_ascii_case(c)
    }

    fn unsupported(&self, node: &NodeId, reason: impl Into<String>) -> TranslateError {
        TranslateError::UnsupportedConstruct {
            node: node.clone(),
            concept: self.concept(node).to_string(),
            reason: reason.into(),
        }
    }

    fn apply(&mut self, node: &NodeId, rule: &str) {
        self.applied.push(AppliedRule {
            node: node.clone(),
            rule: rule.to_string(),
            family: family_of(rule),
        });
    }

    fn push(&mut self, p: Predicate) {
        match self.sink {
            Sink::Main => self.main.push(p),
            Sink::Key => self.key.push(p),
        }
    }

    fn set_wrapper(&mut self, node: &NodeId, w: Wrapper) -> Result<(), TranslateError> {
        if let Some((prev, _)) = &self.wrapper {
            return Err(self.unsupported(
                node,
                format!("a second aggregate/ordering construct (first one at `{prev}`)"),
            ));
        }
        self.wrapper = Some((node.clone(), w));
        Ok(())
    }

    fn ivar(&mut self, node: &NodeId) -> IntervalVar {
        if let Some(i) = self.interval_names.get(node) {
            return i.clone();
        }
        let base = format!("e{node}");
        let mut name = base.clone();
        let mut n = 2;
        while self.taken_names.contains(&name) {
            name = format!("{base}{n}");
            n += 1;
        }
        self.taken_names.insert(name.clone());
        let iv = IntervalVar::new(name);
        self.interval_names.insert(node.clone(), iv.clone());
        iv
    }

    fn var(node: &NodeId) -> Var {
        Var::new(node.as_str())
    }

    /// Surface form of a named entity: its `:name` node's `:opN` constants in order.
    fn entity_name(&self, id: &NodeId) -> Option<String> {
        let name_node = self
            .g
            .outgoing(id)
            .find(|e| e.role_is("name"))?
            .target_node()?;
        let mut ops: Vec<(u32, String)> = self
            .g
            .outgoing(name_node)
            .filter_map(|e| {
                let n = e
                    .role
                    .to_ascii_lowercase()
                    .strip_prefix("op")?
                    .parse::<u32>()
                    .ok()?;
                let text = match &e.target {
                    NodeTarget::Constant(c) => c.clone(),
                    NodeTarget::Number(n) => n.to_string(),
                    NodeTarget::Node(v) => v.to_string(),
                };
                Some((n, text))
            })
            .collect();
        ops.sort_by_key(|(n, _)| *n);
        Some(
            ops.into_iter()
                .map(|(_, t)| t)
                .collect::<Vec<_>>()
                .join(" "),
        )
    }

    fn operand_node(&self, id: &NodeId) -> Operand {
        match self.entity_name(id) {
            Some(name) => Operand::Const(name),
            None => Operand::Var(Self::var(id)),
        }
    }

    fn operand(&self, t: &NodeTarget) -> Operand {
        match t {
            NodeTarget::Node(id) => self.operand_node(id),
            NodeTarget::Constant(c) => Operand::Const(c.clone()),
            NodeTarget::Number(n) => Operand::Number(n.clone()),
        }
    }

    fn is_unknown(&self, id: &NodeId) -> bool {
        self.concept(id) == AMR_UNKNOWN
    }

    fn node_child(&self, id: &NodeId, role: &str) -> Option<NodeId> {
        self.g.child(id, role).and_then(|t| match t {
            NodeTarget::Node(n) => Some(n.clone()),
            _ => None,
        })
    }

    /// Decides which binder the question projects, from the first unknown.
    fn projection(&mut self) -> Result<Projection, TranslateError> {
        let Some(u) = self.first_unknown.clone() else {
            self.apply(self.g.root(), BOOLEAN);
            return Ok(Projection::None);
        };
        let host = self.g.incoming(&u).next().cloned();
        let Some(edge) = host else {
            return Err(self.unsupported(&u, "the questioned node has no content"));
        };
        let role = edge.role.to_ascii_lowercase();
        match role.as_str() {
            // Yes/no questions mark the polarity as unknown.
            "polarity" => {
                self.consumed.insert(u);
                self.apply(self.g.root(), BOOLEAN);
                Ok(Projection::None)
            }
            "quant" => {
                self.consumed.insert(u);
                self.apply(&edge.source, COUNT);
                self.set_wrapper(&edge.source, Wrapper::Count)?;
                Ok(Projection::Node(edge.source))
            }
            "mod" => {
                self.consumed.insert(u);
                self.apply(&edge.source, PROJECTION);
                Ok(Projection::Node(edge.source))
            }
            "time" => {
                self.consumed.insert(u);
                self.apply(&edge.source, WHEN);
                self.deferred.push_back(Deferred::When {
                    host: edge.source.clone(),
                });
                Ok(Projection::Interval(edge.source))
            }
            _ => {
                self.apply(&u, PROJECTION);
                Ok(Projection::Node(u))
            }
        }
    }

    fn run(mut self) -> Result<Translation, TranslateError> {
        let projection = self.projection()?;
        let boolean = matches!(projection, Projection::None);
        let root = self.g.root().clone();
        self.visit(&root, boolean)?;
        while let Some(d) = self.deferred.pop_front() {
            self.expand(d, boolean)?;
        }
        let expr = self.assemble(projection)?;
        expr.validate().map_err(TranslateError::Invalid)?;
        Ok(Translation {
            expr,
            applied: self.applied,
        })
    }

    fn visit(&mut self, id: &NodeId, boolean: bool) -> Result<(), TranslateError> {
        if self.consumed.contains(id) || !self.visited.insert(id.clone()) {
            return Ok(());
        }
        let concept = self.concept(id);
        if concept.eq_ignore_ascii_case("be-located-at-91") {
            let spatial = self.g.outgoing(id).any(|e| {
                e.role_is("mod")
                    && e.target_node().is_some_and(|t| {
                        ["south", "north", "east", "west"]
                            .iter()
                            .any(|d| self.concept_is(t, d))
                    })
            });
            if spatial {
                return Err(self.unsupported(id, "spatial reasoning rules are not implemented"));
            }
        }
        let frame = is_frame(concept);
        if frame {
            let args = self.frame_args(id);
            self.push(Predicate::Frame {
                name: concept.to_string(),
                instance: Some(Self::var(id)),
                args,
            });
            self.apply(id, FRAME);
        }
        let edges: Vec<Edge> = self.g.outgoing(id).cloned().collect();
        for e in &edges {
            if self.special_edge(id, e, boolean)? {
                continue;
            }
            let role = e.role.to_ascii_lowercase();
            if role == "name" || IGNORED_ROLES.contains(&role.as_str()) {
                continue;
            }
            match inverse_base(&e.role) {
                Some(base) => {
                    let target = e
                        .target_node()
                        .expect("inverse roles point at nodes")
                        .clone();
                    if self.consumed.contains(&target) {
                        continue;
                    }
                    if !is_frame(self.concept(&target)) {
                        let p =
                            self.relation(base, self.operand_node(&target), self.operand_node(id));
                        self.push(p);
                    }
                    self.visit(&target, boolean)?;
                }
                None => {
                    if let NodeTarget::Node(t) = &e.target {
                        if self.consumed.contains(t) {
                            continue;
                        }
                    }
                    if !frame {
                        let p =
                            self.relation(&role, self.operand_node(id), self.operand(&e.target));
                        self.push(p);
                    }
                    if let NodeTarget::Node(t) = &e.target {
                        self.visit(t, boolean)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn relation(&self, role: &str, subject: Operand, object: Operand) -> Predicate {
        Predicate::Frame {
            name: role.to_ascii_lowercase(),
            instance: None,
            args: vec![
                FrameArg {
                    role: "arg0".into(),
                    value: subject,
                },
                FrameArg {
                    role: "arg1".into(),
                    value: object,
                },
            ],
        }
    }

    /// Role arguments of a frame: its own role edges plus `:argN-of` edges
    /// pointing at it, ordered `arg0, arg1, …` then other roles by name.
    fn frame_args(&self, id: &NodeId) -> Vec<FrameArg> {
        let mut args: Vec<((u8, u32, String), usize, FrameArg)> = Vec::new();
        for (i, e) in self.g.edges().iter().enumerate() {
            if &e.source == id {
                if inverse_base(&e.role).is_some() || self.is_special(id, e) {
                    continue;
                }
                let role = e.role.to_ascii_lowercase();
                if role == "name" || IGNORED_ROLES.contains(&role.as_str()) {
                    continue;
                }
                if let NodeTarget::Node(t) = &e.target {
                    if self.consumed.contains(t) {
                        continue;
                    }
                }
                args.push((
                    core_rank(&role),
                    i,
                    FrameArg {
                        role,
                        value: self.operand(&e.target),
                    },
                ));
            } else if e.target_node() == Some(id) {
                if let Some(base) = inverse_base(&e.role) {
                    if self.consumed.contains(&e.source) {
                        continue;
                    }
                    let role = base.to_ascii_lowercase();
                    args.push((
                        core_rank(&role),
                        i,
                        FrameArg {
                            role,
                            value: self.operand_node(&e.source),
                        },
                    ));
                }
            }
        }
        args.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
        args.into_iter().map(|(_, _, a)| a).collect()
    }

    /// Structural test used by `frame_args`; mirrors `special_edge` without side effects.
    fn is_special(&self, host: &NodeId, e: &Edge) -> bool {
        let role = e.role.to_ascii_lowercase();
        let Some(t) = e.target_node() else {
            return false;
        };
        match role.as_str() {
            "time" | "ord" => true,
            "quant" | "mod" if self.is_unknown(t) => true,
            "mod" => self.concept_is(t, "first") || self.concept_is(t, "last"),
            "arg1-of" => self.degree_or_quant(host, t).is_some(),
            _ => false,
        }
    }

    fn degree_or_quant(&self, _host: &NodeId, t: &NodeId) -> Option<(&'static str, NodeId)> {
        let arg3 = self.node_child(t, "arg3")?;
        if self.concept_is(t, "have-quant-91") {
            if self.concept_is(&arg3, "most") {
                return Some((MOST, arg3));
            }
            if self.concept_is(&arg3, "least") {
                return Some((LEAST, arg3));
            }
        }
        if self.concept_is(t, "have-degree-91") && self.node_child(t, "arg4").is_some() {
            if self.concept_is(&arg3, "more") {
                return Some((MORE, arg3));
            }
            if self.concept_is(&arg3, "less") {
                return Some((LESS, arg3));
            }
        }
        None
    }

    /// Matches temporal then numerical rules on one edge. Returns true when
    /// the edge was consumed by a rule.
    fn special_edge(
        &mut self,
        host: &NodeId,
        e: &Edge,
        boolean: bool,
    ) -> Result<bool, TranslateError> {
        let role = e.role.to_ascii_lowercase();
        let Some(t) = e.target_node().cloned() else {
            return Ok(false);
        };
        match role.as_str() {
            "time" => {
                self.time_edge(host, &t, boolean)?;
                Ok(true)
            }
            "ord" => {
                self.ordinal(host, &t, boolean)?;
                Ok(true)
            }
            "quant" | "mod" if self.is_unknown(&t) => {
                // Only the first unknown is projected; others under these
                // roles carry no content.
                self.consumed.insert(t);
                Ok(true)
            }
            "mod" if self.concept_is(&t, "first") || self.concept_is(&t, "last") => {
                self.consumed.insert(t.clone());
                let last = self.concept_is(&t, "last");
                let rule = if last { LAST } else { FIRST };
                if boolean {
                    return Err(self.unsupported(&t, "ordering construct in a yes/no question"));
                }
                self.apply(&t, rule);
                let w = if last {
                    Wrapper::Max {
                        offset: 0,
                        limit: 1,
                    }
                } else {
                    Wrapper::Min {
                        offset: 0,
                        limit: 1,
                    }
                };
                self.set_wrapper(&t, w)?;
                Ok(true)
            }
            "arg1-of" => {
                let Some((rule, _)) = self.degree_or_quant(host, &t) else {
                    return Ok(false);
                };
                self.consumed.insert(t.clone());
                for c in self.g.outgoing(&t) {
                    if let NodeTarget::Node(n) = &c.target {
                        if !c.role_is("arg4") {
                            self.consumed.insert(n.clone());
                        }
                    }
                }
                self.apply(&t, rule);
                match rule {
                    MOST | LEAST => {
                        if boolean {
                            return Err(self.unsupported(&t, "superlative in a yes/no question"));
                        }
                        let sort = Binder::Var(Self::var(host));
                        let w = if rule == MOST {
                            Wrapper::ArgMax {
                                sort,
                                offset: 0,
                                limit: 1,
                            }
                        } else {
                            Wrapper::ArgMin {
                                sort,
                                offset: 0,
                                limit: 1,
                            }
                        };
                        self.set_wrapper(&t, w)?;
                    }
                    _ => {
                        let right = self.node_child(&t, "arg4").expect("matched with :arg4");
                        let op = if rule == MORE {
                            CmpOp::Greater
                        } else {
                            CmpOp::Less
                        };
                        self.deferred.push_back(Deferred::Compare {
                            left: host.clone(),
                            right,
                            op,
                        });
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn time_edge(
        &mut self,
        host: &NodeId,
        t: &NodeId,
        boolean: bool,
    ) -> Result<(), TranslateError> {
        let concept = self.concept(t).to_ascii_lowercase();
        if self.is_unknown(t) {
            // The projected unknown was handled up front; any other questioned
            // time only asserts that the event has an interval.
            if self.first_unknown.as_ref() != Some(t) {
                self.consumed.insert(t.clone());
                self.deferred
                    .push_back(Deferred::When { host: host.clone() });
            }
            return Ok(());
        }
        self.consumed.insert(t.clone());
        if self.cfg.before_concepts.contains(&concept) || self.cfg.after_concepts.contains(&concept)
        {
            let kind = if self.cfg.before_concepts.contains(&concept) {
                TemporalRelation::Before
            } else {
                TemporalRelation::After
            };
            let nested = self
                .node_child(t, "op1")
                .ok_or_else(|| self.unsupported(t, "temporal relation without :op1"))?;
            self.apply(
                t,
                if kind == TemporalRelation::Before {
                    BEFORE
                } else {
                    AFTER
                },
            );
            let sink = if boolean {
                Sink::Main
            } else {
                let sort = Binder::Interval(self.ivar(host));
                let w = match kind {
                    TemporalRelation::Before => Wrapper::ArgMax {
                        sort,
                        offset: 0,
                        limit: 1,
                    },
                    TemporalRelation::After => Wrapper::ArgMin {
                        sort,
                        offset: 0,
                        limit: 1,
                    },
                };
                self.set_wrapper(t, w)?;
                Sink::Key
            };
            self.deferred.push_back(Deferred::Relation {
                host: host.clone(),
                nested,
                kind,
                sink,
            });
        } else if concept == "now" {
            self.apply(t, NOW);
            self.deferred.push_back(Deferred::Now {
                host: host.clone(),
                now: t.clone(),
            });
        } else if concept == "date-entity" {
            let field = |role: &str| match self.g.child(t, role) {
                Some(NodeTarget::Number(n)) => n.as_i64(),
                _ => None,
            };
            let date = match (field("year"), field("month"), field("day")) {
                (Some(y), Some(m), Some(d)) => i32::try_from(y).ok().and_then(|y| {
                    CalendarDate::new(y, u32::try_from(m).ok()?, u32::try_from(d).ok()?)
                }),
                _ => {
                    return Err(self.unsupported(t, "date-entity needs :year, :month and :day"));
                }
            };
            let date = date.ok_or_else(|| self.unsupported(t, "not a calendar date"))?;
            self.apply(t, DATE);
            self.deferred.push_back(Deferred::Date {
                host: host.clone(),
                node: t.clone(),
                date,
            });
        } else if self.cfg.teenager_concepts.contains(&concept) {
            let domain = self
                .node_child(t, "domain")
                .ok_or_else(|| self.unsupported(t, "teenager without :domain"))?;
            self.apply(t, TEENAGER);
            self.deferred.push_back(Deferred::Teenager {
                host: host.clone(),
                domain,
            });
        } else {
            self.consumed.remove(t);
            self.apply(t, OVERLAP);
            self.deferred.push_back(Deferred::Overlap {
                host: host.clone(),
                nested: t.clone(),
            });
        }
        Ok(())
    }

    fn ordinal(&mut self, host: &NodeId, t: &NodeId, boolean: bool) -> Result<(), TranslateError> {
        if !self.concept_is(t, "ordinal-entity") {
            return Err(self.unsupported(t, ":ord must point at an ordinal-entity"));
        }
        self.consumed.insert(t.clone());
        let value = match self.g.child(t, "value") {
            Some(NodeTarget::Number(n)) => n.as_i64(),
            _ => None,
        }
        .ok_or_else(|| self.unsupported(t, "ordinal-entity without an integer :value"))?;
        if boolean {
            return Err(self.unsupported(t, "ordinal in a yes/no question"));
        }
        let sort = Binder::Interval(self.ivar(host));
        let w = if value == -1 {
            self.apply(t, ORDINAL_LAST);
            Wrapper::ArgMax {
                sort,
                offset: 0,
                limit: 1,
            }
        } else if value >= 1 {
            self.apply(t, ORDINAL);
            let x = value as u64;
            let offset = match self.cfg.ordinal_offset_mode {
                OrdinalOffsetMode::ZeroBased => x - 1,
                OrdinalOffsetMode::PlusOne => x + 1,
            };
            Wrapper::ArgMin {
                sort,
                offset,
                limit: 1,
            }
        } else {
            return Err(self.unsupported(t, format!("ordinal value {value} is not supported")));
        };
        self.set_wrapper(t, w)?;
        self.deferred
            .push_back(Deferred::Ordinal { host: host.clone() });
        Ok(())
    }

    fn interval_of(&mut self, node: &NodeId) -> Predicate {
        Predicate::Interval {
            ivar: self.ivar(node),
            source: self.operand_node(node),
        }
    }

    fn expand(&mut self, d: Deferred, boolean: bool) -> Result<(), TranslateError> {
        match d {
            Deferred::When { host } => {
                let p = self.interval_of(&host);
                self.push(p);
            }
            Deferred::Relation {
                host,
                nested,
                kind,
                sink,
            } => {
                let saved = std::mem::replace(&mut self.sink, sink);
                self.visit(&nested, boolean)?;
                let ev = self.ivar(&host);
                let en = self.ivar(&nested);
                let p = self.interval_of(&host);
                self.push(p);
                let p = self.interval_of(&nested);
                self.push(p);
                self.push(match kind {
                    TemporalRelation::Before => Predicate::Before {
                        left: ev,
                        right: en,
                    },
                    TemporalRelation::After => Predicate::After {
                        left: ev,
                        right: en,
                    },
                });
                self.sink = saved;
            }
            Deferred::Overlap { host, nested } => {
                self.visit(&nested, boolean)?;
                let ev = self.ivar(&host);
                let en = self.ivar(&nested);
                let p = self.interval_of(&host);
                self.push(p);
                let p = self.interval_of(&nested);
                self.push(p);
                self.push(Predicate::Overlap {
                    left: ev,
                    right: en,
                });
            }
            Deferred::Now { host, now } => {
                let ev = self.ivar(&host);
                let en = self.ivar(&now);
                let p = self.interval_of(&host);
                self.push(p);
                self.push(Predicate::Now { ivar: en.clone() });
                self.push(Predicate::Overlap {
                    left: ev,
                    right: en,
                });
            }
            Deferred::Date { host, node, date } => {
                let ev = self.ivar(&host);
                let en = self.ivar(&node);
                self.push(Predicate::Date {
                    ivar: en.clone(),
                    date,
                });
                let p = self.interval_of(&host);
                self.push(p);
                self.push(Predicate::Overlap {
                    left: ev,
                    right: en,
                });
            }
            Deferred::Teenager { host, domain } => {
                self.visit(&domain, boolean)?;
                let ev = self.ivar(&host);
                let en = self.ivar(&domain);
                let p = self.interval_of(&host);
                self.push(p);
                self.push(Predicate::Teenager {
                    ivar: en.clone(),
                    person: self.operand_node(&domain),
                });
                self.push(Predicate::Overlap {
                    left: ev,
                    right: en,
                });
            }
            Deferred::Ordinal { host } => {
                let saved = std::mem::replace(&mut self.sink, Sink::Key);
                let p = self.interval_of(&host);
                self.push(p);
                self.sink = saved;
            }
            Deferred::Compare { left, right, op } => {
                self.visit(&right, boolean)?;
                let (Operand::Var(l), Operand::Var(r)) =
                    (self.operand_node(&left), self.operand_node(&right))
                else {
                    return Err(self.unsupported(
                        &left,
                        "comparison between named entities needs value nodes",
                    ));
                };
                self.push(Predicate::Cmp {
                    left: l,
                    right: r,
                    op,
                });
            }
        }
        Ok(())
    }

    fn assemble(&mut self, projection: Projection) -> Result<LambdaExpr, TranslateError> {
        let main = Term::and(std::mem::take(&mut self.main));
        let key_preds = std::mem::take(&mut self.key);
        let bound: Binder = match projection {
            Projection::None => {
                if let Some((node, _)) = &self.wrapper {
                    return Err(self.unsupported(node, "aggregate in a yes/no question"));
                }
                let exists = crate::lambda::ordered_binders(&main);
                return Ok(LambdaExpr::BooleanQuery { exists, body: main });
            }
            Projection::Node(n) => match self.operand_node(&n) {
                Operand::Var(v) => Binder::Var(v),
                _ => return Err(self.unsupported(&n, "the questioned node is a named entity")),
            },
            Projection::Interval(n) => Binder::Interval(self.ivar(&n)),
        };
        let target = Abstraction::closed(vec![bound.clone()], main, &BTreeSet::new());
        let Some((_, wrapper)) = self.wrapper.take() else {
            return Ok(LambdaExpr::Abstraction(target));
        };
        let keyed = |target: Abstraction<Predicate>, sort: Binder, body: Vec<Predicate>| {
            let outer: BTreeSet<Binder> =
                target.bound.iter().chain(&target.exists).cloned().collect();
            let key = Abstraction::closed(vec![bound.clone(), sort], Term::and(body), &outer);
            (target, key)
        };
        Ok(match wrapper {
            Wrapper::Count => LambdaExpr::Count(target),
            Wrapper::Min { offset, limit } => LambdaExpr::Min {
                inner: target,
                offset,
                limit,
            },
            Wrapper::Max { offset, limit } => LambdaExpr::Max {
                inner: target,
                offset,
                limit,
            },
            Wrapper::ArgMin {
                sort,
                offset,
                limit,
            } => {
                let body = if key_preds.is_empty() {
                    self.sort_key_body(&sort, &target)
                } else {
                    key_preds
                };
                let (target, key) = keyed(target, sort, body);
                LambdaExpr::ArgMin {
                    target,
                    key,
                    offset,
                    limit,
                }
            }
            Wrapper::ArgMax {
                sort,
                offset,
                limit,
            } => {
                let body = if key_preds.is_empty() {
                    self.sort_key_body(&sort, &target)
                } else {
                    key_preds
                };
                let (target, key) = keyed(target, sort, body);
                LambdaExpr::ArgMax {
                    target,
                    key,
                    offset,
                    limit,
                }
            }
        })
    }

    /// ψ(vn) for superlatives: the frame predicates instantiated by the sort node.
    fn sort_key_body(&self, sort: &Binder, target: &Abstraction<Predicate>) -> Vec<Predicate> {
        let Binder::Var(v) = sort else {
            return Vec::new();
        };
        target
            .body
            .atoms()
            .into_iter()
            .filter(|p| matches!(p, Predicate::Frame { instance: Some(i), .. } if i == v))
            .cloned()
            .collect()
    }
}
