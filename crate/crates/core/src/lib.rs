//! Temporal question answering over knowledge graphs through AMR and lambda calculus.

pub mod ground;
pub mod harness;
pub mod kb;
pub mod lambda;
pub mod penman;
pub mod rdf;
pub mod rules;
pub mod endpoint;
pub mod sparql;
pub mod store;

pub use ground::{
    ground, ground_with, ground_with_gold, KbLambdaExpr, KbPredicate, KbTerm, Linker,
};
pub use kb::{GoldGrounding, GroundError, KbName, KbProfile, Lexicon, PropertyBinding, Qualifiers};
pub use lambda::{
    Abstraction, Binder, Expr, IntervalVar, LambdaExpr, Operand, Predicate, Term, Var,
};
pub use penman::{parse_penman, serialize_penman, AmrGraph, NodeId, PenmanError};
pub use rdf::{Iri, Literal, RdfTerm};
pub use rules::{
    rule_inventory, translate, translate_with, RuleConfig, TranslateError, Translation,
};
pub use sparql::{emit, parse_sparql, render, SparqlQuery};
pub use store::{eval, eval_bruteforce, load_ntriples, Binding, QueryResult, TripleStore};
