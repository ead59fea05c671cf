use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::kb::KbProfile;
use crate::rdf::{format_datetime, Iri, Literal, RdfTerm, XSD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Set precision, recall and F1. An empty gold set is matched only by an
/// empty answer; an empty answer to a non-empty gold set scores zero.
pub fn score<T: Ord>(gold: &BTreeSet<T>, sys: &BTreeSet<T>) -> Prf {
    let prf = |precision, recall| Prf { precision, recall, f1: f1(precision, recall) };
    match (gold.is_empty(), sys.is_empty()) {
        (true, true) => prf(1.0, 1.0),
        (true, false) => prf(0.0, 1.0),
        (false, true) => prf(0.0, 0.0),
        (false, false) => {
            let hit = gold.intersection(sys).count() as f64;
            prf(hit / sys.len() as f64, hit / gold.len() as f64)
        }
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Comparable text for a result term: IRIs compacted with the profile's
/// prefixes and instants cut to the day.
pub fn normalize_term(t: &RdfTerm, kb: &KbProfile) -> String {
    match t {
        RdfTerm::Iri(i) => kb.compact(i),
        RdfTerm::Literal(Literal::DateTime(d)) => {
            let full = format_datetime(d);
            full.split('T').next().unwrap_or(&full).to_string()
        }
        RdfTerm::Literal(l) => l.lexical(),
    }
}

/// Normalizes a gold answer written as a prefixed name, an IRI, a date or
/// any other lexical form, so that it compares with [`normalize_term`].
pub fn normalize_answer(text: &str, kb: &KbProfile) -> String {
    let s = text.trim();
    if let Ok(iri) = kb.expand(s) {
        return kb.compact(&iri);
    }
    let bare = s.trim_start_matches('<').trim_end_matches('>');
    if bare.contains("://") {
        if let Ok(iri) = Iri::new(bare) {
            return kb.compact(&iri);
        }
    }
    if let Ok(l @ Literal::DateTime(_)) = Literal::from_lexical(s, &format!("{XSD}dateTime")) {
        return normalize_term(&RdfTerm::Literal(l), kb);
    }
    s.to_string()
}
