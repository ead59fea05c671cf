//! AMR graphs in PENMAN notation.
//!
//! A graph is kept exactly as written: nodes in the order their concepts are
//! introduced, edges in the order their roles appear, and each edge attached
//! to the node whose parentheses contain it (so `:arg1-of` edges are stored
//! un-inverted). Rule matching and serialization both rely on that order.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Concept that marks the questioned entity.
pub const AMR_UNKNOWN: &str = "amr-unknown";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PenmanError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("variable `{var}` is given two concepts (`{first}` and `{second}`)")]
    DuplicateConcept {
        var: String,
        first: String,
        second: String,
    },
    #[error("invalid graph: {0}")]
    Invalid(String),
}

/// A node variable such as `v` or `n2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(var: impl Into<String>) -> Result<Self, PenmanError> {
        let var = var.into();
        if is_valid_var(&var) {
            Ok(NodeId(var))
        } else {
            Err(PenmanError::Invalid(format!(
                "`{var}` is not a valid variable name"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_valid_var(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

/// Exact decimal constant, kept in its canonical lexical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Number(String);

impl Number {
    pub fn parse(s: &str) -> Option<Self> {
        let body = s.strip_prefix('+').unwrap_or(s);
        let (neg, digits) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body),
        };
        let (int, frac) = match digits.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (digits, None),
        };
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if let Some(f) = frac {
            if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
        }
        let int = int.trim_start_matches('0');
        let int = if int.is_empty() { "0" } else { int };
        let frac = frac
            .map(|f| f.trim_end_matches('0'))
            .filter(|f| !f.is_empty());
        let zero = int == "0" && frac.is_none();
        let mut out = String::new();
        if neg && !zero {
            out.push('-');
        }
        out.push_str(int);
        if let Some(f) = frac {
            out.push('.');
            out.push_str(f);
        }
        Some(Number(out))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.0.parse().ok()
    }
}

impl TryFrom<String> for Number {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        Number::parse(&s).ok_or_else(|| format!("`{s}` is not a decimal number"))
    }
}

impl From<Number> for String {
    fn from(n: Number) -> String {
        n.0
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmrNode {
    pub var: NodeId,
    pub concept: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeTarget {
    Node(NodeId),
    Constant(String),
    Number(Number),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    /// Role label without the leading colon, as written (`arg0`, `ARG1-of`, `time`).
    pub role: String,
    pub target: NodeTarget,
}

impl Edge {
    pub fn target_node(&self) -> Option<&NodeId> {
        match &self.target {
            NodeTarget::Node(id) => Some(id),
            _ => None,
        }
    }

    pub fn role_is(&self, role: &str) -> bool {
        self.role.eq_ignore_ascii_case(role)
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    root: NodeId,
    nodes: Vec<AmrNode>,
    edges: Vec<Edge>,
}

/// Rooted, labeled, directed graph.
///
/// Equality is structural: same root, same node set, same edge multiset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct AmrGraph {
    root: NodeId,
    nodes: Vec<AmrNode>,
    edges: Vec<Edge>,
    index: HashMap<NodeId, usize>,
}

impl TryFrom<RawGraph> for AmrGraph {
    type Error = PenmanError;
    fn try_from(raw: RawGraph) -> Result<Self, PenmanError> {
        AmrGraph::new(raw.root, raw.nodes, raw.edges)
    }
}

impl From<AmrGraph> for RawGraph {
    fn from(g: AmrGraph) -> RawGraph {
        RawGraph {
            root: g.root,
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl PartialEq for AmrGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.root != other.root || self.nodes.len() != other.nodes.len() {
            return false;
        }
        let nodes: HashSet<&AmrNode> = self.nodes.iter().collect();
        if !other.nodes.iter().all(|n| nodes.contains(n)) {
            return false;
        }
        let mut a: Vec<&Edge> = self.edges.iter().collect();
        let mut b: Vec<&Edge> = other.edges.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl Eq for AmrGraph {}

impl AmrGraph {
    /// Builds a graph, checking every structural invariant.
    pub fn new(root: NodeId, nodes: Vec<AmrNode>, edges: Vec<Edge>) -> Result<Self, PenmanError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if !is_valid_var(node.var.as_str()) {
                return Err(PenmanError::Invalid(format!(
                    "`{}` is not a valid variable name",
                    node.var
                )));
            }
            if node.concept.is_empty() {
                return Err(PenmanError::Invalid(format!(
                    "node `{}` has an empty concept",
                    node.var
                )));
            }
            if let Some(prev) = index.insert(node.var.clone(), i) {
                return Err(PenmanError::DuplicateConcept {
                    var: node.var.to_string(),
                    first: nodes[prev].concept.clone(),
                    second: node.concept.clone(),
                });
            }
        }
        if !index.contains_key(&root) {
            return Err(PenmanError::Invalid(format!("root `{root}` is not a node")));
        }
        for e in &edges {
            if !index.contains_key(&e.source) {
                return Err(PenmanError::Invalid(format!(
                    "edge source `{}` is not a node",
                    e.source
                )));
            }
            if let NodeTarget::Node(t) = &e.target {
                if !index.contains_key(t) {
                    return Err(PenmanError::Invalid(format!(
                        "edge target `{t}` is not a node"
                    )));
                }
            }
            if e.role.is_empty()
                || e.role
                    .chars()
                    .any(|c| c.is_whitespace() || c == '(' || c == ')')
            {
                return Err(PenmanError::Invalid(format!("bad role label `{}`", e.role)));
            }
        }
        let graph = AmrGraph {
            root,
            nodes,
            edges,
            index,
        };
        let reached = graph.undirected_reach();
        if reached.len() != graph.nodes.len() {
            let missing = graph
                .nodes
                .iter()
                .find(|n| !reached.contains(&n.var))
                .map(|n| n.var.to_string())
                .unwrap_or_default();
            return Err(PenmanError::Invalid(format!(
                "node `{missing}` is not connected to the root"
            )));
        }
        Ok(graph)
    }

    fn undirected_reach(&self) -> HashSet<NodeId> {
        let mut adj: HashMap<&NodeId, Vec<&NodeId>> = HashMap::new();
        for e in &self.edges {
            if let NodeTarget::Node(t) = &e.target {
                adj.entry(&e.source).or_default().push(t);
                adj.entry(t).or_default().push(&e.source);
            }
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([&self.root]);
        seen.insert(self.root.clone());
        while let Some(n) = queue.pop_front() {
            for m in adj.get(n).into_iter().flatten() {
                if seen.insert((*m).clone()) {
                    queue.push_back(m);
                }
            }
        }
        seen
    }

    pub fn root(&self) -> &NodeId {
        &self.root
    }

    /// Nodes in document order.
    pub fn nodes(&self) -> &[AmrNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: &NodeId) -> Option<&AmrNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn concept(&self, id: &NodeId) -> Option<&str> {
        self.node(id).map(|n| n.concept.as_str())
    }

    /// Edges written inside `id`'s parentheses, in source order.
    pub fn outgoing(&self, id: &NodeId) -> impl Iterator<Item = &Edge> + '_ {
        let id = id.clone();
        self.edges.iter().filter(move |e| e.source == id)
    }

    /// Edges whose target is `id`, in source order.
    pub fn incoming(&self, id: &NodeId) -> impl Iterator<Item = &Edge> + '_ {
        let id = id.clone();
        self.edges
            .iter()
            .filter(move |e| matches!(&e.target, NodeTarget::Node(t) if *t == id))
    }

    /// First outgoing edge of `id` with the given role (case-insensitive).
    pub fn child(&self, id: &NodeId, role: &str) -> Option<&NodeTarget> {
        self.outgoing(id)
            .find(|e| e.role_is(role))
            .map(|e| &e.target)
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        self.nodes.iter().map(|n| n.var.as_str()).collect()
    }

    /// All `amr-unknown` nodes in document order.
    pub fn find_unknowns(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.concept == AMR_UNKNOWN)
            .map(|n| n.var.clone())
            .collect()
    }

    /// Single-line PENMAN text. Re-entrant nodes are expanded at their first
    /// occurrence in a depth-first walk from the root and referenced by bare
    /// variable afterwards.
    pub fn to_penman(&self) -> String {
        let mut out = String::new();
        let mut expanded = HashSet::new();
        self.write_node(&self.root, &mut out, &mut expanded);
        out
    }

    fn write_node(&self, id: &NodeId, out: &mut String, expanded: &mut HashSet<NodeId>) {
        expanded.insert(id.clone());
        let concept = self.concept(id).unwrap_or_default();
        out.push('(');
        out.push_str(id.as_str());
        out.push_str(" / ");
        out.push_str(concept);
        for e in self.outgoing(id) {
            out.push_str(" :");
            out.push_str(&e.role);
            out.push(' ');
            match &e.target {
                NodeTarget::Node(t) if expanded.contains(t) => out.push_str(t.as_str()),
                NodeTarget::Node(t) => self.write_node(t, out, expanded),
                NodeTarget::Constant(c) => write_quoted(c, out),
                NodeTarget::Number(n) => out.push_str(n.as_str()),
            }
        }
        out.push(')');
    }
}

impl fmt::Display for AmrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_penman())
    }
}

fn write_quoted(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

pub fn serialize_penman(g: &AmrGraph) -> String {
    g.to_penman()
}

pub fn find_unknowns(g: &AmrGraph) -> Vec<NodeId> {
    g.find_unknowns()
}

/// Parses a single PENMAN s-expression.
pub fn parse_penman(text: &str) -> Result<AmrGraph, PenmanError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
        raw_edges: Vec::new(),
    };
    p.skip_ws();
    let root = p.node()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.expected("end of input"));
    }
    let defined: HashSet<&str> = p.nodes.iter().map(|n| n.var.as_str()).collect();
    let edges = p
        .raw_edges
        .iter()
        .map(|(source, role, target)| Edge {
            source: source.clone(),
            role: role.clone(),
            target: match target {
                RawTarget::Node(id) => NodeTarget::Node(id.clone()),
                RawTarget::Quoted(s) => NodeTarget::Constant(s.clone()),
                RawTarget::Symbol(s) if defined.contains(s.as_str()) => {
                    NodeTarget::Node(NodeId(s.clone()))
                }
                RawTarget::Symbol(s) => match Number::parse(s) {
                    Some(n) => NodeTarget::Number(n),
                    None => NodeTarget::Constant(s.clone()),
                },
            },
        })
        .collect();
    AmrGraph::new(root, p.nodes, edges)
}

enum RawTarget {
    Node(NodeId),
    Quoted(String),
    Symbol(String),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nodes: Vec<AmrNode>,
    raw_edges: Vec<(NodeId, String, RawTarget)>,
}

impl Parser<'_> {
    fn expected(&self, what: &str) -> PenmanError {
        PenmanError::Syntax {
            position: self.pos,
            expected: what.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.src.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                // comment line (metadata such as `# ::snt`)
                while let Some(&b) = self.src.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8, what: &str) -> Result<(), PenmanError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn symbol(&mut self) -> &str {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace()
                || matches!(b, b'(' | b')' | b'"' | b'/')
                || (b == b':' && self.pos > start)
            {
                break;
            }
            self.pos += 1;
        }
        // input is &str and we only split on ASCII bytes
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default()
    }

    fn node(&mut self) -> Result<NodeId, PenmanError> {
        self.eat(b'(', "`(`")?;
        self.skip_ws();
        let var_pos = self.pos;
        let var = self.symbol().to_string();
        if !is_valid_var(&var) {
            self.pos = var_pos;
            return Err(self.expected("variable"));
        }
        let id = NodeId(var);
        self.skip_ws();
        self.eat(b'/', "`/`")?;
        self.skip_ws();
        let concept = self.concept()?;
        if let Some(prev) = self.nodes.iter().find(|n| n.var == id) {
            return Err(PenmanError::DuplicateConcept {
                var: id.to_string(),
                first: prev.concept.clone(),
                second: concept,
            });
        }
        self.nodes.push(AmrNode {
            var: id.clone(),
            concept,
        });
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    return Ok(id);
                }
                Some(b':') => {
                    self.pos += 1;
                    let role = self.symbol().to_string();
                    if role.is_empty() {
                        return Err(self.expected("role label"));
                    }
                    self.skip_ws();
                    let target = self.target()?;
                    self.raw_edges.push((id.clone(), role, target));
                }
                None => return Err(self.expected("`)`")),
                _ => return Err(self.expected("`:role` or `)`")),
            }
        }
    }

    fn concept(&mut self) -> Result<String, PenmanError> {
        if self.peek() == Some(b'"') {
            return self.quoted();
        }
        let c = self.symbol().to_string();
        if c.is_empty() {
            Err(self.expected("concept"))
        } else {
            Ok(c)
        }
    }

    fn target(&mut self) -> Result<RawTarget, PenmanError> {
        match self.peek() {
            Some(b'(') => Ok(RawTarget::Node(self.node()?)),
            Some(b'"') => Ok(RawTarget::Quoted(self.quoted()?)),
            Some(b')') | Some(b':') | None => Err(self.expected("role target")),
            _ => {
                let s = self.symbol().to_string();
                if s.is_empty() {
                    Err(self.expected("role target"))
                } else {
                    Ok(RawTarget::Symbol(s))
                }
            }
        }
    }

    fn quoted(&mut self) -> Result<String, PenmanError> {
        self.eat(b'"', "`\"`")?;
        let mut buf = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.expected("closing `\"`")),
                Some(b'"') => {
                    self.pos += 1;
                    break;
                }
                Some(b'\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(b) => {
                            buf.push(b);
                            self.pos += 1;
                        }
                        None => return Err(self.expected("escaped character")),
                    }
                }
                Some(b) => {
                    buf.push(b);
                    self.pos += 1;
                }
            }
        }
        String::from_utf8(buf).map_err(|_| self.expected("UTF-8 string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TITANIC_DIRECTOR: &str = r#"(v / direct-01 :arg0 (a / amr-unknown) :arg1 (m / movie :name (n / name :op1 "Titanic")))"#;

    fn id(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    #[test]
    fn parses_titanic_director() {
        let g = parse_penman(TITANIC_DIRECTOR).unwrap();
        assert_eq!(g.nodes().len(), 4);
        assert_eq!(g.root(), &id("v"));
        assert_eq!(g.concept(&id("m")), Some("movie"));
        assert_eq!(
            g.child(&id("n"), "op1"),
            Some(&NodeTarget::Constant("Titanic".into()))
        );
    }

    #[test]
    fn parses_before_construct() {
        let g = parse_penman("(v / play-01 :time (b / before :op1 (n / nested)))").unwrap();
        assert_eq!(g.concept(&id("b")), Some("before"));
        assert_eq!(g.child(&id("b"), "op1"), Some(&NodeTarget::Node(id("n"))));
    }

    #[test]
    fn unbalanced_is_syntax_error() {
        let err = parse_penman("(v / x :arg0 v").unwrap_err();
        assert!(matches!(err, PenmanError::Syntax { .. }), "{err:?}");
    }

    #[test]
    fn other_syntax_errors() {
        for bad in [
            "",
            "v / x",
            "(v x)",
            "(v / )",
            "(1v / x)",
            "(v / x :arg0)",
            "(v / x) trailing",
            "(v / x :op1 \"open)",
        ] {
            assert!(
                matches!(parse_penman(bad), Err(PenmanError::Syntax { .. })),
                "accepted {bad:?}"
            );
        }
    }

    #[test]
    fn duplicate_concept_rejected() {
        let err = parse_penman("(a / x :arg0 (a / y))").unwrap_err();
        assert_eq!(
            err,
            PenmanError::DuplicateConcept {
                var: "a".into(),
                first: "x".into(),
                second: "y".into()
            }
        );
    }

    #[test]
    fn reentrancy_is_one_node_many_edges() {
        let g = parse_penman("(w / want-01 :arg0 (b / boy) :arg1 (g / go-02 :arg0 b))").unwrap();
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.incoming(&id("b")).count(), 2);
        let text = g.to_penman();
        assert_eq!(
            text,
            "(w / want-01 :arg0 (b / boy) :arg1 (g / go-02 :arg0 b))"
        );
    }

    #[test]
    fn forward_reference_resolves_to_node() {
        let g = parse_penman("(g / go-02 :arg0 b :arg1 (b / boy))").unwrap();
        assert_eq!(g.child(&id("g"), "arg0"), Some(&NodeTarget::Node(id("b"))));
    }

    #[test]
    fn constants_and_numbers() {
        let g =
            parse_penman("(d / date-entity :year 1997 :month 12 :day 19 :polarity - :value -1.50)")
                .unwrap();
        assert_eq!(
            g.child(&id("d"), "year"),
            Some(&NodeTarget::Number(Number::parse("1997").unwrap()))
        );
        assert_eq!(
            g.child(&id("d"), "polarity"),
            Some(&NodeTarget::Constant("-".into()))
        );
        assert_eq!(
            g.child(&id("d"), "value").unwrap(),
            &NodeTarget::Number(Number::parse("-1.5").unwrap())
        );
    }

    #[test]
    fn single_node_serialization() {
        let g = parse_penman("(a / amr-unknown)").unwrap();
        assert_eq!(serialize_penman(&g), "(a / amr-unknown)");
    }

    #[test]
    fn unknowns_in_document_order() {
        let g = parse_penman(TITANIC_DIRECTOR).unwrap();
        assert_eq!(find_unknowns(&g), vec![id("a")]);
        let g = parse_penman("(r / rain-01 :time (t / today))").unwrap();
        assert!(find_unknowns(&g).is_empty());
        let g =
            parse_penman("(s / speak-01 :arg1 (l / language :quant (a / amr-unknown)))").unwrap();
        assert_eq!(find_unknowns(&g), vec![id("a")]);
        let g = parse_penman("(x / f :arg0 (b / amr-unknown) :arg1 (a / amr-unknown))").unwrap();
        assert_eq!(find_unknowns(&g), vec![id("b"), id("a")]);
    }

    #[test]
    fn constructed_graph_invariants() {
        let node = |v: &str, c: &str| AmrNode {
            var: id(v),
            concept: c.into(),
        };
        // disconnected
        let err = AmrGraph::new(id("a"), vec![node("a", "x"), node("b", "y")], vec![]).unwrap_err();
        assert!(matches!(err, PenmanError::Invalid(_)));
        // dangling edge
        let err = AmrGraph::new(
            id("a"),
            vec![node("a", "x")],
            vec![Edge {
                source: id("a"),
                role: "arg0".into(),
                target: NodeTarget::Node(id("z")),
            }],
        )
        .unwrap_err();
        assert!(matches!(err, PenmanError::Invalid(_)));
        // missing root
        assert!(AmrGraph::new(id("r"), vec![node("a", "x")], vec![]).is_err());
        // empty concept
        assert!(AmrGraph::new(id("a"), vec![node("a", "")], vec![]).is_err());
    }

    #[test]
    fn comments_and_uppercase_roles() {
        let g = parse_penman(
            "# ::snt Who directed Titanic?\n(d / direct-01\n   :ARG0 (a / amr-unknown))",
        )
        .unwrap();
        assert!(g.outgoing(&id("d")).next().unwrap().role_is("arg0"));
    }

    #[test]
    fn json_round_trip_checks_invariants() {
        let g = parse_penman(TITANIC_DIRECTOR).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        let back: AmrGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
        let bad = r#"{"root":"q","nodes":[{"var":"a","concept":"x"}],"edges":[]}"#;
        assert!(serde_json::from_str::<AmrGraph>(bad).is_err());
    }

    #[test]
    fn number_canonical_form() {
        assert_eq!(Number::parse("+007").unwrap().as_str(), "7");
        assert_eq!(Number::parse("-0.0").unwrap().as_str(), "0");
        assert_eq!(Number::parse("3.140").unwrap().as_str(), "3.14");
        assert!(Number::parse("1e3").is_none());
        assert!(Number::parse("-").is_none());
        assert!(Number::parse("1.").is_none());
    }
}
