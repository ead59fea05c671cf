//! In-memory triple store and an evaluator for the emitted SPARQL subset.

mod eval;
mod expr;
mod oracle;
mod results;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::rdf::{Iri, Literal, RdfTerm};

pub use eval::{eval, Binding, EvalError, QueryResult};
pub use oracle::eval_bruteforce;
pub use results::{from_results_json, to_results_json, ResultsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("N-Triples parse error on line {line}: {message}")]
pub struct NTriplesError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: RdfTerm,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: RdfTerm) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }
}

/// Immutable set of triples with per-position indexes.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    triples: Vec<[RdfTerm; 3]>,
    set: HashSet<[RdfTerm; 3]>,
    by_subject: HashMap<RdfTerm, Vec<usize>>,
    by_predicate: HashMap<RdfTerm, Vec<usize>>,
    by_object: HashMap<RdfTerm, Vec<usize>>,
    terms: Vec<RdfTerm>,
    term_ids: HashMap<RdfTerm, usize>,
    id_triples: HashSet<[usize; 3]>,
}

impl TripleStore {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut set = HashSet::new();
        let mut list: Vec<[RdfTerm; 3]> = Vec::new();
        for t in triples {
            let row = [RdfTerm::Iri(t.subject), RdfTerm::Iri(t.predicate), t.object];
            if set.insert(row.clone()) {
                list.push(row);
            }
        }
        list.sort_by_cached_key(|r| r.iter().map(RdfTerm::canonical).collect::<Vec<_>>());
        let mut store = TripleStore {
            triples: list,
            set,
            ..TripleStore::default()
        };
        for (i, [s, p, o]) in store.triples.iter().enumerate() {
            store.by_subject.entry(s.clone()).or_default().push(i);
            store.by_predicate.entry(p.clone()).or_default().push(i);
            store.by_object.entry(o.clone()).or_default().push(i);
            let mut ids = [0; 3];
            for (k, t) in [s, p, o].into_iter().enumerate() {
                let next = store.terms.len();
                ids[k] = *store.term_ids.entry(t.clone()).or_insert_with(|| {
                    store.terms.push(t.clone());
                    next
                });
            }
            store.id_triples.insert(ids);
        }
        store
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, s: &RdfTerm, p: &RdfTerm, o: &RdfTerm) -> bool {
        self.set.contains(&[s.clone(), p.clone(), o.clone()])
    }

    pub(crate) fn term_id(&self, t: &RdfTerm) -> Option<usize> {
        self.term_ids.get(t).copied()
    }

    pub(crate) fn contains_ids(&self, ids: [usize; 3]) -> bool {
        self.id_triples.contains(&ids)
    }

    /// Every distinct term, in first-occurrence order over the sorted triples.
    pub fn terms(&self) -> &[RdfTerm] {
        &self.terms
    }

    pub fn triples(&self) -> impl Iterator<Item = &[RdfTerm; 3]> {
        self.triples.iter()
    }

    /// Triples matching the given constants, using the most selective index.
    pub(crate) fn matching(
        &self,
        s: Option<&RdfTerm>,
        p: Option<&RdfTerm>,
        o: Option<&RdfTerm>,
    ) -> Vec<&[RdfTerm; 3]> {
        let candidates: Vec<&Vec<usize>> = [
            (s, &self.by_subject),
            (p, &self.by_predicate),
            (o, &self.by_object),
        ]
        .into_iter()
        .filter_map(|(k, idx)| k.map(|k| idx.get(k)))
        .map(|v| v.map_or(&EMPTY, |v| v))
        .collect();
        let ok = |r: &[RdfTerm; 3]| {
            s.is_none_or(|x| *x == r[0])
                && p.is_none_or(|x| *x == r[1])
                && o.is_none_or(|x| *x == r[2])
        };
        match candidates.into_iter().min_by_key(|v| v.len()) {
            Some(ids) => ids
                .iter()
                .map(|&i| &self.triples[i])
                .filter(|r| ok(r))
                .collect(),
            None => self.triples.iter().collect(),
        }
    }

    /// N-Triples serialization in canonical order.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        for [s, p, o] in &self.triples {
            out.push_str(&format!("{s} {p} {o} .\n"));
        }
        out
    }
}

static EMPTY: Vec<usize> = Vec::new();

pub fn load_ntriples(text: &str) -> Result<TripleStore, NTriplesError> {
    let mut triples = Vec::new();
    for (n, parsed) in oxttl::NTriplesParser::new()
        .for_slice(text.as_bytes())
        .enumerate()
    {
        let t = parsed.map_err(|e| NTriplesError {
            line: e.location().start.line + 1,
            message: e.message().to_string(),
        })?;
        let line_of = || {
            // Statements are line oriented; count non-blank, non-comment lines.
            text.lines()
                .enumerate()
                .filter(|(_, l)| {
                    let l = l.trim();
                    !l.is_empty() && !l.starts_with('#')
                })
                .nth(n)
                .map(|(i, _)| i as u64 + 1)
                .unwrap_or(0)
        };
        let err = |message: String| NTriplesError {
            line: line_of(),
            message,
        };
        let subject = match &t.subject {
            oxrdf::NamedOrBlankNode::NamedNode(n) => {
                Iri::new(n.as_str()).map_err(|e| err(e.to_string()))?
            }
            oxrdf::NamedOrBlankNode::BlankNode(_) => {
                return Err(err("blank nodes are not supported".into()))
            }
        };
        let predicate = Iri::new(t.predicate.as_str()).map_err(|e| err(e.to_string()))?;
        let object = match &t.object {
            oxrdf::Term::NamedNode(n) => {
                RdfTerm::Iri(Iri::new(n.as_str()).map_err(|e| err(e.to_string()))?)
            }
            oxrdf::Term::Literal(l) => RdfTerm::Literal(match l.language() {
                Some(lang) => Literal::LangString {
                    value: l.value().to_string(),
                    lang: lang.to_string(),
                },
                None => Literal::from_lexical(l.value(), l.datatype().as_str())
                    .map_err(|e| err(e.to_string()))?,
            }),
            _ => return Err(err("blank nodes are not supported".into())),
        };
        triples.push(Triple::new(subject, predicate, object));
    }
    Ok(TripleStore::new(triples))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TITANIC: &str = "<http://www.wikidata.org/entity/Q44578> <http://www.wikidata.org/prop/direct/P577> \"1997-12-19T00:00:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .\n";

    #[test]
    fn loads_one_triple_and_dedups() {
        let s = load_ntriples(TITANIC).unwrap();
        assert_eq!(s.len(), 1);
        let s = load_ntriples(&format!("{TITANIC}{TITANIC}")).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.to_ntriples(), TITANIC);
    }

    #[test]
    fn malformed_literal_reports_line() {
        let bad = format!("{TITANIC}\n<http://a.org/s> <http://a.org/p> \"soon\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .\n");
        let e = load_ntriples(&bad).unwrap_err();
        assert_eq!(e.line, 3);
        let e = load_ntriples("<http://a.org/s> <http://a.org/p> .\n").unwrap_err();
        assert_eq!(e.line, 1);
    }
}
