use std::fmt::Write;

use super::{Element, Expression, PatternTerm, Projection, QueryForm, SparqlQuery};
use crate::kb::compact_with;
use crate::rdf::{quote, Literal, RdfTerm};

/// Canonical text: one PREFIX line per declared prefix, one element per
/// line, two-space indentation, and solution modifiers on a single line.
pub fn render(q: &SparqlQuery) -> String {
    let r = Renderer {
        prefixes: &q.prefixes,
    };
    let mut out = String::new();
    for (p, ns) in &q.prefixes {
        let _ = writeln!(out, "PREFIX {p}: <{ns}>");
    }
    match q.form {
        QueryForm::Ask => out.push_str("ASK WHERE {\n"),
        QueryForm::Select => {
            out.push_str("SELECT ");
            if q.distinct {
                out.push_str("DISTINCT ");
            }
            match &q.projection {
                Projection::Vars(vs) => {
                    out.push_str(
                        &vs.iter()
                            .map(|v| format!("?{v}"))
                            .collect::<Vec<_>>()
                            .join(" "),
                    );
                }
                Projection::Count {
                    var,
                    distinct,
                    alias,
                } => {
                    let d = if *distinct { "DISTINCT " } else { "" };
                    let _ = write!(out, "(COUNT({d}?{var}) AS ?{alias})");
                }
            }
            out.push_str(" WHERE {\n");
        }
    }
    r.group(&q.where_clause, 1, &mut out);
    out.push('}');
    let mut modifiers = Vec::new();
    if let Some(k) = &q.order_by {
        if k.descending {
            modifiers.push(format!("ORDER BY DESC(?{})", k.var));
        } else {
            modifiers.push(format!("ORDER BY (?{})", k.var));
        }
    }
    if let Some(l) = q.limit {
        modifiers.push(format!("LIMIT {l}"));
    }
    if let Some(o) = q.offset {
        modifiers.push(format!("OFFSET {o}"));
    }
    if !modifiers.is_empty() {
        out.push('\n');
        out.push_str(&modifiers.join(" "));
    }
    out.push('\n');
    out
}

struct Renderer<'a> {
    prefixes: &'a [(String, String)],
}

impl Renderer<'_> {
    fn group(&self, elements: &[Element], depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        for e in elements {
            match e {
                Element::Triple(t) => {
                    let _ = writeln!(
                        out,
                        "{pad}{} {} {}.",
                        self.term(&t.subject),
                        self.term(&t.predicate),
                        self.term(&t.object)
                    );
                }
                Element::Filter { expr } => {
                    let _ = writeln!(out, "{pad}FILTER({})", self.expr(expr));
                }
                Element::Bind { expr, var } => {
                    let _ = writeln!(out, "{pad}BIND ({} AS ?{var})", self.expr(expr));
                }
                Element::Union { branches } => {
                    for (i, b) in branches.iter().enumerate() {
                        if i == 0 {
                            let _ = writeln!(out, "{pad}{{");
                        } else {
                            let _ = writeln!(out, "{pad}}} UNION {{");
                        }
                        self.group(b, depth + 1, out);
                    }
                    let _ = writeln!(out, "{pad}}}");
                }
            }
        }
    }

    pub(super) fn term(&self, t: &PatternTerm) -> String {
        match t {
            PatternTerm::Var(v) => format!("?{v}"),
            PatternTerm::Term(RdfTerm::Iri(i)) => compact_with(self.prefixes, i),
            PatternTerm::Term(RdfTerm::Literal(l)) => self.literal(l),
        }
    }

    fn literal(&self, l: &Literal) -> String {
        match l {
            Literal::String(s) => quote(s),
            Literal::LangString { value, lang } => format!("{}@{lang}", quote(value)),
            Literal::Integer(i) => i.to_string(),
            Literal::Boolean(b) => b.to_string(),
            Literal::Decimal(x) if x.0.is_finite() && !l.lexical().contains(['e', 'E']) => {
                l.lexical()
            }
            other => {
                let dt = crate::rdf::Iri::new(other.datatype()).expect("datatype IRIs are valid");
                format!(
                    "{}^^{}",
                    quote(&other.lexical()),
                    compact_with(self.prefixes, &dt)
                )
            }
        }
    }

    fn expr(&self, e: &Expression) -> String {
        match e {
            Expression::Term { term } => self.term(term),
            Expression::Now => "now()".into(),
            Expression::Bound { var } => format!("bound(?{var})"),
            Expression::Not { inner } => format!("!({})", self.expr(inner)),
            Expression::Add { left, right } => {
                format!("({} + {})", self.expr(left), self.expr(right))
            }
            Expression::Sub { left, right } => {
                format!("({} - {})", self.expr(left), self.expr(right))
            }
            Expression::Compare { op, left, right } => {
                format!(
                    "{}{}{}",
                    self.operand(left),
                    op.symbol(),
                    self.operand(right)
                )
            }
            Expression::And { left, right } => {
                format!(
                    "{} && {}",
                    self.and_side(left, false),
                    self.and_side(right, true)
                )
            }
            Expression::Or { left, right } => {
                let r = match right.as_ref() {
                    Expression::Or { .. } => format!("({})", self.expr(right)),
                    _ => self.expr(right),
                };
                format!("{} || {r}", self.expr(left))
            }
        }
    }

    fn and_side(&self, e: &Expression, right: bool) -> String {
        match e {
            Expression::Or { .. } => format!("({})", self.expr(e)),
            Expression::And { .. } if right => format!("({})", self.expr(e)),
            _ => self.expr(e),
        }
    }

    fn operand(&self, e: &Expression) -> String {
        match e {
            Expression::Compare { .. } | Expression::And { .. } | Expression::Or { .. } => {
                format!("({})", self.expr(e))
            }
            _ => self.expr(e),
        }
    }
}
