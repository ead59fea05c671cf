//! SPARQL 1.1 query results JSON, read and write.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::eval::{Binding, QueryResult};
use crate::rdf::{Iri, Literal, RdfTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed results document: {0}")]
pub struct ResultsError(pub String);

fn term_json(t: &RdfTerm) -> Value {
    match t {
        RdfTerm::Iri(i) => json!({"type": "uri", "value": i.as_str()}),
        RdfTerm::Literal(Literal::String(s)) => json!({"type": "literal", "value": s}),
        RdfTerm::Literal(Literal::LangString { value, lang }) => {
            json!({"type": "literal", "value": value, "xml:lang": lang})
        }
        RdfTerm::Literal(l) => {
            json!({"type": "literal", "value": l.lexical(), "datatype": l.datatype()})
        }
    }
}

pub fn to_results_json(r: &QueryResult) -> Value {
    match r {
        QueryResult::Boolean(b) => json!({"head": {}, "boolean": b}),
        QueryResult::Bindings { vars, rows } => {
            let bindings: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let m: Map<String, Value> = vars
                        .iter()
                        .filter_map(|v| row.get(v).map(|t| (v.clone(), term_json(t))))
                        .collect();
                    Value::Object(m)
                })
                .collect();
            json!({"head": {"vars": vars}, "results": {"bindings": bindings}})
        }
    }
}

fn bad(msg: impl Into<String>) -> ResultsError {
    ResultsError(msg.into())
}

fn json_term(v: &Value) -> Result<RdfTerm, ResultsError> {
    let field = |k: &str| v.get(k).and_then(Value::as_str);
    let value = field("value").ok_or_else(|| bad("term without a string value"))?;
    match field("type") {
        Some("uri") => Iri::new(value)
            .map(RdfTerm::Iri)
            .map_err(|e| bad(e.to_string())),
        // Blank nodes have no stable identity across requests; keep them as
        // opaque IRIs so they can still be counted and compared.
        Some("bnode") => Iri::new(format!("urn:bnode:{value}"))
            .map(RdfTerm::Iri)
            .map_err(|e| bad(e.to_string())),
        Some("literal") | Some("typed-literal") => {
            if let Some(lang) = field("xml:lang") {
                return Ok(RdfTerm::Literal(Literal::LangString {
                    value: value.to_string(),
                    lang: lang.to_string(),
                }));
            }
            match field("datatype") {
                Some(dt) => Literal::from_lexical(value, dt)
                    .map(RdfTerm::Literal)
                    .map_err(|e| bad(e.to_string())),
                None => Ok(RdfTerm::Literal(Literal::String(value.to_string()))),
            }
        }
        other => Err(bad(format!("unknown term type {other:?}"))),
    }
}

pub fn from_results_json(text: &str) -> Result<QueryResult, ResultsError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if let Some(b) = doc.get("boolean") {
        return b
            .as_bool()
            .map(QueryResult::Boolean)
            .ok_or_else(|| bad("boolean is not a bool"));
    }
    let vars = doc
        .pointer("/head/vars")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing head.vars"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| bad("variable name is not a string"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = doc
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing results.bindings"))?
        .iter()
        .map(|row| {
            let obj = row
                .as_object()
                .ok_or_else(|| bad("binding is not an object"))?;
            obj.iter()
                .map(|(k, v)| Ok((k.clone(), json_term(v)?)))
                .collect::<Result<Binding, ResultsError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QueryResult::Bindings { vars, rows })
}
