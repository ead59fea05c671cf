//! Fixtures and random instance generators shared by the integration tests.
#![allow(dead_code)]

pub mod golden;

use std::collections::BTreeSet;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use kbqa_core::harness::{
    gold_answers, load_dataset, normalize_term, run_pipeline, DatasetRecord, PipelineContext, Stage, StoreExecutor,
};
use kbqa_core::rules::RuleConfig;
use chrono::NaiveDate;
use kbqa_core::sparql::{
    interval_relation, CompareOp, Element, Expression, IntervalRelation, OrderKey, PatternTerm, Projection, QueryForm,
    SparqlQuery, TriplePattern,
};
use kbqa_core::store::Triple;
use kbqa_core::{eval, load_ntriples, parse_sparql, Iri, IntervalVar, KbProfile, Lexicon, Literal, QueryResult, RdfTerm, TripleStore};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    // Resolves from any crate of the workspace.
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn store() -> TripleStore {
    load_ntriples(&read_fixture("kb.nt")).expect("fixture store parses")
}

pub fn lexicon() -> Lexicon {
    Lexicon::from_json(&read_fixture("lexicon.json")).expect("fixture lexicon parses")
}

pub fn corrupted_lexicon() -> Lexicon {
    Lexicon::from_json(&read_fixture("lexicon_corrupted.json")).expect("corrupted lexicon parses")
}

pub fn dataset() -> Vec<DatasetRecord> {
    load_dataset(&read_fixture("dataset.jsonl")).expect("fixture dataset parses")
}

pub fn now() -> DateTime<Utc> {
    "2024-01-01T00:00:00Z".parse().expect("valid instant")
}

/// Records with a fully specified question and gold query, kept as the
/// end-to-end regression set.
pub const WORKED: [&str; 5] = [
    "titanic-release",
    "titanic-director",
    "cameron-dicaprio",
    "cold-war-president",
    "douglas-bravo-teenager",
];

/// Runs a worked example from its gold AMR and gold grounding and compares
/// its answers with those of the gold query on the fixture store.
pub fn check_worked_example(record: &DatasetRecord, store: &TripleStore, lex: &Lexicon) -> Result<(), String> {
    let exec = StoreExecutor { store, now: now() };
    let ctx = PipelineContext {
        lexicon: lex,
        rules: RuleConfig::default(),
        executor: &exec,
    };
    let overrides: BTreeSet<Stage> = [Stage::GtAmr, Stage::GtEl, Stage::GtRl].into();
    let run = run_pipeline(record, &overrides, &ctx).map_err(|e| e.to_string())?;
    if let Some(e) = &run.trace.error {
        return Err(format!("{}: {e}", record.id));
    }
    let kb = KbProfile::by_name(record.kb);
    let gold_q = parse_sparql(&record.gold_sparql).map_err(|e| e.to_string())?;
    let gold: BTreeSet<String> = eval(&gold_q, store, now())
        .map_err(|e| e.to_string())?
        .answers()
        .iter()
        .map(|t| normalize_term(t, &kb))
        .collect();
    if gold.is_empty() {
        return Err(format!("{}: gold query has no answers on the fixture", record.id));
    }
    if run.answers != gold {
        return Err(format!("{}: emitted {:?}, gold {:?}", record.id, run.answers, gold));
    }
    if gold != gold_answers(record) {
        return Err(format!("{}: recorded gold answers drifted from the gold query", record.id));
    }
    Ok(())
}

const EX: &str = "http://example.org/";

fn iri(local: &str) -> Iri {
    Iri::new(format!("{EX}{local}")).expect("valid IRI")
}

fn entity(i: usize) -> RdfTerm {
    RdfTerm::Iri(iri(&format!("e{i}")))
}

fn date(day: u32) -> Literal {
    // Spread over two years so that month arithmetic crosses years.
    let year = 2000 + (day / 120) as i32;
    Literal::date(year, day / 10 % 12 + 1, day % 10 * 3 + 1).expect("valid date")
}

pub const ENTITIES: usize = 30;
const DATES: u32 = 6;
const LINKS: [&str; 3] = ["p0", "p1", "p2"];
const TIMES: [&str; 2] = ["start", "end"];

/// A store of at most `max` triples over a small vocabulary of entities,
/// link properties and date-valued properties.
pub fn random_store(rng: &mut impl Rng, max: usize) -> TripleStore {
    let n = rng.gen_range(0..=max);
    let mut triples = Vec::with_capacity(n);
    for _ in 0..n {
        let s = iri(&format!("e{}", rng.gen_range(0..ENTITIES)));
        if rng.gen_bool(0.7) {
            let p = iri(LINKS.choose(rng).expect("non-empty"));
            triples.push(Triple::new(s, p, entity(rng.gen_range(0..ENTITIES))));
        } else {
            let p = iri(TIMES.choose(rng).expect("non-empty"));
            triples.push(Triple::new(s, p, RdfTerm::Literal(date(rng.gen_range(0..DATES * 10)))));
        }
    }
    TripleStore::new(triples)
}

struct QueryGen<'r, R: Rng> {
    rng: &'r mut R,
    entity_vars: Vec<String>,
    date_vars: Vec<String>,
    counter: usize,
}

impl<R: Rng> QueryGen<'_, R> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("{prefix}{}", self.counter)
    }

    fn entity_slot(&mut self, branch_vars: &mut Vec<String>) -> PatternTerm {
        let roll = self.rng.gen_range(0..10);
        if roll < 2 {
            PatternTerm::Term(entity(self.rng.gen_range(0..ENTITIES)))
        } else if roll < 6 && !self.entity_vars.is_empty() {
            PatternTerm::var(self.entity_vars.choose(self.rng).expect("non-empty").clone())
        } else {
            let v = self.fresh("x");
            self.entity_vars.push(v.clone());
            branch_vars.push(v.clone());
            PatternTerm::var(v)
        }
    }

    fn triple(&mut self, branch_vars: &mut Vec<String>) -> Element {
        // Emitted queries are connected: every pattern after the first hangs
        // off a variable that is already in play.
        let subject = if !self.entity_vars.is_empty() {
            PatternTerm::var(self.entity_vars.choose(self.rng).expect("non-empty").clone())
        } else {
            self.entity_slot(branch_vars)
        };
        if self.rng.gen_bool(0.6) {
            let p = PatternTerm::iri(iri(LINKS.choose(self.rng).expect("non-empty")));
            let o = self.entity_slot(branch_vars);
            Element::Triple(TriplePattern::new(subject, p, o))
        } else {
            let p = PatternTerm::iri(iri(TIMES.choose(self.rng).expect("non-empty")));
            let o = if self.rng.gen_bool(0.15) {
                PatternTerm::literal(date(self.rng.gen_range(0..DATES * 10)))
            } else {
                let v = self.fresh("d");
                self.date_vars.push(v.clone());
                branch_vars.push(v.clone());
                PatternTerm::var(v)
            };
            Element::Triple(TriplePattern::new(subject, p, o))
        }
    }

    fn date_operand(&mut self) -> Expression {
        if !self.date_vars.is_empty() && self.rng.gen_bool(0.8) {
            Expression::var(self.date_vars.choose(self.rng).expect("non-empty").clone())
        } else {
            Expression::term(PatternTerm::literal(date(self.rng.gen_range(0..DATES * 10))))
        }
    }

    fn filter(&mut self) -> Element {
        let ops = [CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge, CompareOp::Eq, CompareOp::Ne];
        let expr = match self.rng.gen_range(0..4) {
            0 => Expression::and(
                Expression::compare(CompareOp::Le, self.date_operand(), self.date_operand()),
                Expression::compare(CompareOp::Le, self.date_operand(), self.date_operand()),
            ),
            1 if !self.entity_vars.is_empty() => {
                let v = self.entity_vars.choose(self.rng).expect("non-empty").clone();
                let op = *[CompareOp::Eq, CompareOp::Ne].choose(self.rng).expect("non-empty");
                Expression::compare(op, Expression::var(v), Expression::term(PatternTerm::Term(entity(self.rng.gen_range(0..ENTITIES)))))
            }
            2 => Expression::Or {
                left: Box::new(Expression::compare(*ops.choose(self.rng).expect("non-empty"), self.date_operand(), self.date_operand())),
                right: Box::new(Expression::Not {
                    inner: Box::new(Expression::Bound {
                        var: self.date_vars.first().cloned().unwrap_or_else(|| "unbound".into()),
                    }),
                }),
            },
            _ => Expression::compare(*ops.choose(self.rng).expect("non-empty"), self.date_operand(), self.date_operand()),
        };
        Element::Filter { expr }
    }

    fn bind(&mut self) -> Element {
        let var = self.fresh("b");
        let expr = match self.rng.gen_range(0..3) {
            0 => Expression::Now,
            1 => self.date_operand(),
            _ => {
                let years = *["P1Y", "P13Y", "P1M", "-P2M"].choose(self.rng).expect("non-empty");
                Expression::add(
                    self.date_operand(),
                    Expression::term(PatternTerm::literal(Literal::from_lexical(years, "http://www.w3.org/2001/XMLSchema#duration").expect("valid duration"))),
                )
            }
        };
        self.date_vars.push(var.clone());
        Element::Bind { expr, var }
    }

    fn group(&mut self, depth: usize) -> Vec<Element> {
        let mut out = Vec::new();
        let mut scratch = Vec::new();
        for _ in 0..self.rng.gen_range(1..=2) {
            out.push(self.triple(&mut scratch));
        }
        if depth == 0 && self.rng.gen_bool(0.3) {
            let branches = (0..2).map(|_| self.group(depth + 1)).collect();
            out.push(Element::Union { branches });
        }
        if self.rng.gen_bool(0.4) {
            out.push(self.bind());
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            out.push(self.filter());
        }
        // BIND targets never occur in patterns, so any order is valid and
        // a BIND may read variables that are only bound after it.
        out.shuffle(self.rng);
        out
    }
}

/// A query in the shape the emitter produces: triple patterns with
/// FILTER, BIND and UNION, under SELECT DISTINCT, COUNT or ASK.
pub fn random_query(rng: &mut impl Rng) -> SparqlQuery {
    let mut g = QueryGen {
        rng,
        entity_vars: Vec::new(),
        date_vars: Vec::new(),
        counter: 0,
    };
    let where_clause = g.group(0);
    let mut q = SparqlQuery {
        prefixes: Vec::new(),
        form: QueryForm::Select,
        distinct: true,
        projection: Projection::Vars(Vec::new()),
        where_clause,
        order_by: None,
        limit: None,
        offset: None,
    };
    let bound: Vec<String> = q.bound_vars().into_iter().collect();
    match if bound.is_empty() { 0 } else { g.rng.gen_range(0..6) } {
        0 => {
            q.form = QueryForm::Ask;
            q.distinct = false;
        }
        1 => {
            q.distinct = false;
            q.projection = Projection::Count {
                var: bound.choose(g.rng).expect("some variable").clone(),
                distinct: g.rng.gen_bool(0.5),
                alias: "c".into(),
            };
        }
        _ => {
            let k = g.rng.gen_range(1..=bound.len().min(3));
            let vars: Vec<String> = bound.choose_multiple(g.rng, k).cloned().collect();
            q.projection = Projection::Vars(vars);
            q.distinct = g.rng.gen_bool(0.8);
            if g.rng.gen_bool(0.5) {
                q.order_by = Some(OrderKey {
                    var: bound.choose(g.rng).expect("some variable").clone(),
                    descending: g.rng.gen_bool(0.5),
                });
                q.limit = g.rng.gen_bool(0.7).then(|| g.rng.gen_range(1..=3));
                q.offset = g.rng.gen_bool(0.5).then(|| g.rng.gen_range(0..=2));
            }
        }
    }
    q
}

pub type Span = (NaiveDate, NaiveDate);

fn date_expr(d: NaiveDate) -> Expression {
    use chrono::Datelike;
    Expression::term(PatternTerm::literal(Literal::date(d.year(), d.month(), d.day()).expect("valid date")))
}

/// Evaluates the relation's filter over two constant intervals on an
/// empty store.
pub fn interval_holds(rel: IntervalRelation, a: Span, b: Span) -> bool {
    let (l, r) = (IntervalVar::new("e1"), IntervalVar::new("e2"));
    let bind = |expr, var: String| Element::Bind { expr, var };
    let q = SparqlQuery {
        prefixes: Vec::new(),
        form: QueryForm::Ask,
        distinct: false,
        projection: Projection::Vars(Vec::new()),
        where_clause: vec![
            bind(date_expr(a.0), l.start_name()),
            bind(date_expr(a.1), l.end_name()),
            bind(date_expr(b.0), r.start_name()),
            bind(date_expr(b.1), r.end_name()),
            Element::Filter { expr: interval_relation(rel, &l, &r) },
        ],
        order_by: None,
        limit: None,
        offset: None,
    };
    match eval(&q, &TripleStore::default(), now()).expect("constant query evaluates") {
        QueryResult::Boolean(b) => b,
        other => panic!("ASK gave {other:?}"),
    }
}

/// The day `offset` days after 1990-01-01.
pub fn day(offset: i64) -> NaiveDate {
    NaiveDate::from_ymd_opt(1990, 1, 1).expect("valid date") + chrono::Duration::days(offset)
}
