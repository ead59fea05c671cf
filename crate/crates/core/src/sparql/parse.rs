//! Parser for the SPARQL subset: PREFIX, SELECT/ASK, triple blocks with `;`
//! and `,`, FILTER, BIND, UNION, ORDER BY, LIMIT and OFFSET. Keywords are
//! case-insensitive; undeclared well-known prefixes are filled in.

use std::fmt;

use thiserror::Error;

use super::{
    CompareOp, Element, Expression, OrderKey, PatternTerm, Projection, QueryForm, SparqlQuery,
    TriplePattern,
};
use crate::kb::default_prefixes;
use crate::rdf::{Iri, Literal, RDF_TYPE, XSD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("SPARQL syntax error at byte {position}: {message}")]
pub struct SparqlParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    IriRef(String),
    /// `prefix:local`; local may be empty.
    PName(String, String),
    Word(String),
    Str {
        value: String,
        lang: Option<String>,
        datatype: Option<Box<Tok>>,
    },
    Int(String),
    Dec(String),
    Punct(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Var(v) => write!(f, "?{v}"),
            Tok::IriRef(i) => write!(f, "<{i}>"),
            Tok::PName(p, l) => write!(f, "{p}:{l}"),
            Tok::Word(w) => f.write_str(w),
            Tok::Str { value, .. } => write!(f, "{value:?}"),
            Tok::Int(n) | Tok::Dec(n) => f.write_str(n),
            Tok::Punct(p) => f.write_str(p),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

const PUNCT: &[&str] = &[
    "&&", "||", "!=", "<=", ">=", "^^", "{", "}", "(", ")", ".", ";", ",", "*", "=", "<", ">", "+",
    "-", "!", "/",
];

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn err(&self, at: usize, message: impl Into<String>) -> SparqlParseError {
        SparqlParseError {
            position: at,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        loop {
            let r = self.rest();
            let trimmed = r.trim_start();
            self.pos += r.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, SparqlParseError> {
        let mut out: Vec<(usize, Tok)> = Vec::new();
        while let Some((start, tok)) = self.next_token()? {
            if tok != Tok::Punct("^^") {
                out.push((start, tok));
                continue;
            }
            // Attach the datatype to the preceding string literal.
            let dt = match self.next_token()? {
                Some((_, t @ (Tok::IriRef(_) | Tok::PName(..)))) => t,
                _ => return Err(self.err(start, "expected datatype IRI after ^^")),
            };
            match out.last_mut() {
                Some((
                    _,
                    Tok::Str {
                        lang: None,
                        datatype,
                        ..
                    },
                )) if datatype.is_none() => {
                    *datatype = Some(Box::new(dt));
                }
                _ => return Err(self.err(start, "^^ must follow a string literal")),
            }
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>, SparqlParseError> {
        self.skip_ws();
        let start = self.pos;
        let r = self.rest();
        let Some(c) = r.chars().next() else {
            return Ok(None);
        };
        let tok = if c == '?' || c == '$' {
            let name: String = r[1..]
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                .collect();
            if name.is_empty() {
                return Err(self.err(start, "empty variable name"));
            }
            self.pos += 1 + name.len();
            Tok::Var(name)
        } else if let Some(body) = self.iri_ref() {
            self.pos += body.len() + 2;
            Tok::IriRef(body.to_string())
        } else if c == '"' || c == '\'' {
            self.string(c)?
        } else if c.is_ascii_digit() {
            let int: String = r.chars().take_while(|c| c.is_ascii_digit()).collect();
            let frac: String = match r[int.len()..].strip_prefix('.') {
                Some(a) => a.chars().take_while(|c| c.is_ascii_digit()).collect(),
                None => String::new(),
            };
            if frac.is_empty() {
                self.pos += int.len();
                Tok::Int(int)
            } else {
                self.pos += int.len() + 1 + frac.len();
                Tok::Dec(format!("{int}.{frac}"))
            }
        } else if c.is_ascii_alphabetic() {
            let word: String = r.chars().take_while(|c| is_name_char(*c)).collect();
            if let Some(local_src) = r[word.len()..].strip_prefix(':') {
                let mut local: String = local_src
                    .chars()
                    .take_while(|c| is_name_char(*c) || *c == '.')
                    .collect();
                while local.ends_with('.') {
                    local.pop();
                }
                self.pos += word.len() + 1 + local.len();
                Tok::PName(word, local)
            } else {
                self.pos += word.len();
                Tok::Word(word)
            }
        } else if let Some(p) = PUNCT.iter().find(|p| r.starts_with(**p)) {
            self.pos += p.len();
            Tok::Punct(p)
        } else {
            return Err(self.err(start, format!("unexpected character `{c}`")));
        };
        Ok(Some((start, tok)))
    }

    /// `<…>` is an IRI reference only when its body is an absolute IRI;
    /// otherwise `<` is the less-than operator.
    fn iri_ref(&self) -> Option<&'a str> {
        let r = self.rest();
        if !r.starts_with('<') {
            return None;
        }
        let end = r.find('>')?;
        let body = &r[1..end];
        Iri::new(body).ok().map(|_| body)
    }

    fn string(&mut self, quote: char) -> Result<Tok, SparqlParseError> {
        let start = self.pos;
        let mut value = String::new();
        let mut chars = self.rest().char_indices().skip(1);
        let mut end = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => {
                    let (_, e) = chars
                        .next()
                        .ok_or_else(|| self.err(start, "unterminated string"))?;
                    value.push(match e {
                        'n' => '\n',
                        'r' => '\r',
                        't' => '\t',
                        other => other,
                    });
                }
                c if c == quote => {
                    end = Some(i + 1);
                    break;
                }
                '\n' => return Err(self.err(start, "newline in string literal")),
                c => value.push(c),
            }
        }
        let end = end.ok_or_else(|| self.err(start, "unterminated string"))?;
        self.pos += end;
        let mut lang = None;
        if let Some(rest) = self.rest().strip_prefix('@') {
            let tag: String = rest
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric() || *c == '-')
                .collect();
            if tag.is_empty() {
                return Err(self.err(self.pos, "empty language tag"));
            }
            self.pos += 1 + tag.len();
            lang = Some(tag);
        }
        Ok(Tok::Str {
            value,
            lang,
            datatype: None,
        })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    prefixes: Vec<(String, String)>,
    declared: Vec<(String, String)>,
}

pub fn parse_sparql(text: &str) -> Result<SparqlQuery, SparqlParseError> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let mut p = Parser {
        toks,
        i: 0,
        end: text.len(),
        prefixes: default_prefixes(),
        declared: Vec::new(),
    };
    p.query()
}

/// Parses a single pattern term as written by `PatternTerm`'s serializer.
pub(crate) fn parse_pattern_term(text: &str) -> Result<PatternTerm, SparqlParseError> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let mut p = Parser {
        toks,
        i: 0,
        end: text.len(),
        prefixes: default_prefixes(),
        declared: Vec::new(),
    };
    let t = p.pattern_term()?;
    if p.i != p.toks.len() {
        return Err(p.err("trailing input after term"));
    }
    Ok(t)
}

impl Parser {
    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> SparqlParseError {
        SparqlParseError {
            position: self.pos(),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(_, t)| t.clone());
        self.i += 1;
        t
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x.eq_ignore_ascii_case(w))
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), SparqlParseError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.err(format!("expected {w}")))
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(x)) if *x == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SparqlParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|t| t.to_string())
                .unwrap_or_else(|| "end of input".into());
            Err(self.err(format!("expected `{p}`, found `{found}`")))
        }
    }

    fn var(&mut self) -> Result<String, SparqlParseError> {
        match self.next() {
            Some(Tok::Var(v)) => Ok(v),
            _ => {
                self.i -= 1;
                Err(self.err("expected a variable"))
            }
        }
    }

    fn query(&mut self) -> Result<SparqlQuery, SparqlParseError> {
        while self.eat_word("PREFIX") {
            let (prefix, local) = match self.next() {
                Some(Tok::PName(p, l)) => (p, l),
                _ => {
                    self.i -= 1;
                    return Err(self.err("expected `prefix:` after PREFIX"));
                }
            };
            if !local.is_empty() {
                return Err(self.err("prefix declaration must end with `:`"));
            }
            let ns = match self.next() {
                Some(Tok::IriRef(i)) => i,
                _ => {
                    self.i -= 1;
                    return Err(self.err("expected namespace IRI"));
                }
            };
            self.prefixes.retain(|(p, _)| *p != prefix);
            self.prefixes.push((prefix.clone(), ns.clone()));
            self.declared.retain(|(p, _)| *p != prefix);
            self.declared.push((prefix, ns));
        }
        let (form, distinct, projection) = if self.eat_word("ASK") {
            (QueryForm::Ask, false, Projection::Vars(Vec::new()))
        } else if self.eat_word("SELECT") {
            let distinct = self.eat_word("DISTINCT");
            if !distinct {
                self.eat_word("REDUCED");
            }
            let projection = if self.is_punct("(") {
                self.i += 1;
                self.expect_word("COUNT")?;
                self.expect_punct("(")?;
                let cd = self.eat_word("DISTINCT");
                let var = self.var()?;
                self.expect_punct(")")?;
                self.expect_word("AS")?;
                let alias = self.var()?;
                self.expect_punct(")")?;
                Projection::Count {
                    var,
                    distinct: cd,
                    alias,
                }
            } else {
                let mut vars = Vec::new();
                while let Some(Tok::Var(v)) = self.peek() {
                    vars.push(v.clone());
                    self.i += 1;
                }
                if vars.is_empty() {
                    return Err(self.err("expected projected variables"));
                }
                Projection::Vars(vars)
            };
            (QueryForm::Select, distinct, projection)
        } else {
            return Err(self.err("expected SELECT or ASK"));
        };
        self.eat_word("WHERE");
        let where_clause = self.group()?;
        let mut order_by = None;
        let mut limit = None;
        let mut offset = None;
        loop {
            if self.eat_word("ORDER") {
                self.expect_word("BY")?;
                let descending = if self.eat_word("DESC") {
                    true
                } else {
                    self.eat_word("ASC");
                    false
                };
                let var = if self.eat_punct("(") {
                    let v = self.var()?;
                    self.expect_punct(")")?;
                    v
                } else {
                    self.var()?
                };
                order_by = Some(OrderKey { var, descending });
            } else if self.eat_word("LIMIT") {
                limit = Some(self.integer()?);
            } else if self.eat_word("OFFSET") {
                offset = Some(self.integer()?);
            } else {
                break;
            }
        }
        if self.i < self.toks.len() {
            return Err(self.err(format!("unexpected `{}`", self.peek().expect("in range"))));
        }
        Ok(SparqlQuery {
            prefixes: std::mem::take(&mut self.declared),
            form,
            distinct,
            projection,
            where_clause,
            order_by,
            limit,
            offset,
        })
    }

    fn integer(&mut self) -> Result<u64, SparqlParseError> {
        match self.next() {
            Some(Tok::Int(n)) => n.parse().map_err(|_| self.err("integer out of range")),
            _ => {
                self.i -= 1;
                Err(self.err("expected an integer"))
            }
        }
    }

    fn group(&mut self) -> Result<Vec<Element>, SparqlParseError> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        loop {
            if self.eat_punct("}") {
                return Ok(out);
            }
            if self.eat_punct(".") {
                continue;
            }
            if self.eat_word("FILTER") {
                let expr = if self.is_punct("(") {
                    self.i += 1;
                    let e = self.expression()?;
                    self.expect_punct(")")?;
                    e
                } else {
                    self.primary()?
                };
                out.push(Element::Filter { expr });
            } else if self.eat_word("BIND") {
                self.expect_punct("(")?;
                let expr = self.expression()?;
                self.expect_word("AS")?;
                let var = self.var()?;
                self.expect_punct(")")?;
                out.push(Element::Bind { expr, var });
            } else if self.is_punct("{") {
                let mut branches = vec![self.group()?];
                while self.eat_word("UNION") {
                    branches.push(self.group()?);
                }
                if branches.len() == 1 {
                    out.extend(branches.pop().expect("one branch"));
                } else {
                    out.push(Element::Union { branches });
                }
            } else if self.peek().is_none() {
                return Err(self.err("unterminated group"));
            } else {
                self.triples(&mut out)?;
            }
        }
    }

    fn triples(&mut self, out: &mut Vec<Element>) -> Result<(), SparqlParseError> {
        let subject = self.pattern_term()?;
        loop {
            let predicate = if self.eat_word("a") {
                PatternTerm::iri(Iri::new(RDF_TYPE).expect("valid"))
            } else {
                self.pattern_term()?
            };
            loop {
                let object = self.pattern_term()?;
                out.push(Element::Triple(TriplePattern::new(
                    subject.clone(),
                    predicate.clone(),
                    object,
                )));
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                break;
            }
            if self.is_punct(".") || self.is_punct("}") {
                break;
            }
        }
        Ok(())
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<Iri, SparqlParseError> {
        let ns = self
            .prefixes
            .iter()
            .find(|(p, _)| p == prefix)
            .map(|(_, ns)| ns)
            .ok_or_else(|| self.err(format!("undeclared prefix `{prefix}:`")))?;
        Iri::new(format!("{ns}{local}")).map_err(|e| self.err(e.to_string()))
    }

    fn iri_tok(&self, t: &Tok) -> Result<Iri, SparqlParseError> {
        match t {
            Tok::IriRef(i) => Iri::new(i.clone()).map_err(|e| self.err(e.to_string())),
            Tok::PName(p, l) => self.expand(p, l),
            _ => Err(self.err("expected an IRI")),
        }
    }

    fn pattern_term(&mut self) -> Result<PatternTerm, SparqlParseError> {
        let Some(t) = self.next() else {
            return Err(self.err("unexpected end of input"));
        };
        let term = match t {
            Tok::Var(v) => PatternTerm::Var(v),
            Tok::IriRef(_) | Tok::PName(..) => PatternTerm::iri(self.iri_tok(&t)?),
            Tok::Str {
                value,
                lang,
                datatype,
            } => PatternTerm::literal(self.string_literal(value, lang, datatype)?),
            Tok::Int(n) => PatternTerm::literal(Literal::Integer(
                n.parse().map_err(|_| self.err("integer out of range"))?,
            )),
            Tok::Dec(n) => PatternTerm::literal(Literal::Decimal(
                n.parse::<f64>()
                    .map_err(|_| self.err("bad decimal"))?
                    .into(),
            )),
            Tok::Punct("-") => match self.next() {
                Some(Tok::Int(n)) => PatternTerm::literal(Literal::Integer(
                    format!("-{n}")
                        .parse()
                        .map_err(|_| self.err("integer out of range"))?,
                )),
                Some(Tok::Dec(n)) => PatternTerm::literal(Literal::Decimal(
                    format!("-{n}")
                        .parse::<f64>()
                        .map_err(|_| self.err("bad decimal"))?
                        .into(),
                )),
                _ => {
                    self.i -= 1;
                    return Err(self.err("expected a number after `-`"));
                }
            },
            Tok::Word(w) if w.eq_ignore_ascii_case("true") || w.eq_ignore_ascii_case("false") => {
                PatternTerm::literal(Literal::Boolean(w.eq_ignore_ascii_case("true")))
            }
            other => {
                self.i -= 1;
                return Err(self.err(format!("expected a term, found `{other}`")));
            }
        };
        Ok(term)
    }

    fn string_literal(
        &self,
        value: String,
        lang: Option<String>,
        datatype: Option<Box<Tok>>,
    ) -> Result<Literal, SparqlParseError> {
        if let Some(lang) = lang {
            return Ok(Literal::LangString { value, lang });
        }
        match datatype {
            None => Ok(Literal::String(value)),
            Some(dt) => {
                let dt = self.iri_tok(&dt)?;
                if dt.as_str() == format!("{XSD}string") {
                    return Ok(Literal::String(value));
                }
                Literal::from_lexical(&value, dt.as_str()).map_err(|e| self.err(e.to_string()))
            }
        }
    }

    fn expression(&mut self) -> Result<Expression, SparqlParseError> {
        let mut left = self.conjunction()?;
        while self.eat_punct("||") {
            let right = self.conjunction()?;
            left = Expression::Or {
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Expression, SparqlParseError> {
        let mut left = self.relational()?;
        while self.eat_punct("&&") {
            let right = self.relational()?;
            left = Expression::and(left, right);
        }
        Ok(left)
    }

    fn relational(&mut self) -> Result<Expression, SparqlParseError> {
        let left = self.additive()?;
        let op = match self.peek() {
            Some(Tok::Punct("=")) => CompareOp::Eq,
            Some(Tok::Punct("!=")) => CompareOp::Ne,
            Some(Tok::Punct("<")) => CompareOp::Lt,
            Some(Tok::Punct("<=")) => CompareOp::Le,
            Some(Tok::Punct(">")) => CompareOp::Gt,
            Some(Tok::Punct(">=")) => CompareOp::Ge,
            _ => return Ok(left),
        };
        self.i += 1;
        let right = self.additive()?;
        Ok(Expression::compare(op, left, right))
    }

    fn additive(&mut self) -> Result<Expression, SparqlParseError> {
        let mut left = self.unary()?;
        loop {
            if self.eat_punct("+") {
                let right = self.unary()?;
                left = Expression::add(left, right);
            } else if self.is_punct("-") {
                self.i += 1;
                let right = self.unary()?;
                left = Expression::Sub {
                    left: Box::new(left),
                    right: Box::new(right),
                };
            } else {
                return Ok(left);
            }
        }
    }

    fn unary(&mut self) -> Result<Expression, SparqlParseError> {
        if self.eat_punct("!") {
            let inner = self.unary()?;
            return Ok(Expression::Not {
                inner: Box::new(inner),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expression, SparqlParseError> {
        if self.eat_punct("(") {
            let e = self.expression()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        if self.eat_word("now") {
            self.expect_punct("(")?;
            self.expect_punct(")")?;
            return Ok(Expression::Now);
        }
        if self.eat_word("bound") {
            self.expect_punct("(")?;
            let var = self.var()?;
            self.expect_punct(")")?;
            return Ok(Expression::Bound { var });
        }
        Ok(Expression::term(self.pattern_term()?))
    }
}
