mod support;

use std::collections::BTreeSet;
use std::time::Instant;

use kbqa_core::harness::{categorize, evaluate, run_pipeline, Category, PipelineContext, PipelineError, Stage, StoreExecutor};
use kbqa_core::{parse_sparql, Lexicon, RuleConfig, TripleStore};

/// Override sets of the ablation, each adding one gold stage to the last.
fn ablation_chain() -> Vec<BTreeSet<Stage>> {
    let steps = [Stage::GtEl, Stage::GtRl, Stage::GtKbLambda, Stage::GtSparql];
    let mut chain = vec![BTreeSet::new()];
    for s in steps {
        let mut next = chain.last().unwrap().clone();
        next.insert(s);
        chain.push(next);
    }
    chain
}

fn macro_f1(store: &TripleStore, lex: &Lexicon, overrides: &BTreeSet<Stage>) -> f64 {
    let exec = StoreExecutor { store, now: support::now() };
    let ctx = PipelineContext {
        lexicon: lex,
        rules: RuleConfig::default(),
        executor: &exec,
    };
    evaluate(&support::dataset(), overrides, &ctx).unwrap().f1
}

#[test]
fn worked_examples_match_their_gold_queries() {
    let (store, lex) = (support::store(), support::lexicon());
    let data = support::dataset();
    let started = Instant::now();
    for id in support::WORKED {
        let rec = data.iter().find(|r| r.id == id).unwrap();
        support::check_worked_example(rec, &store, &lex).unwrap();
    }
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn gold_sparql_scores_perfectly() {
    let (store, lex) = (support::store(), support::corrupted_lexicon());
    let all: BTreeSet<Stage> = [Stage::GtSparql].into();
    let exec = StoreExecutor { store: &store, now: support::now() };
    let ctx = PipelineContext {
        lexicon: &lex,
        rules: RuleConfig::default(),
        executor: &exec,
    };
    let report = evaluate(&support::dataset(), &all, &ctx).unwrap();
    assert_eq!((report.precision, report.recall, report.f1), (1.0, 1.0, 1.0), "{}", report.to_table());
}

#[test]
fn ablation_is_monotone_under_a_noisy_lexicon() {
    let (store, lex) = (support::store(), support::corrupted_lexicon());
    let scores: Vec<f64> = ablation_chain().iter().map(|o| macro_f1(&store, &lex, o)).collect();
    for w in scores.windows(2) {
        assert!(w[0] <= w[1], "{scores:?}");
    }
    assert!(scores[0] < 1.0, "the noisy lexicon should cost something: {scores:?}");
    assert_eq!(*scores.last().unwrap(), 1.0);
}

#[test]
fn full_lexicon_answers_the_supported_questions() {
    let (store, lex) = (support::store(), support::lexicon());
    let exec = StoreExecutor { store: &store, now: support::now() };
    let ctx = PipelineContext {
        lexicon: &lex,
        rules: RuleConfig::default(),
        executor: &exec,
    };
    let report = evaluate(&support::dataset(), &BTreeSet::new(), &ctx).unwrap();
    for q in &report.questions {
        // A year-only date is the one construct the rules decline.
        if q.id == "president-in-1947" {
            assert_eq!(q.f1, 0.0);
            assert!(q.error.is_some());
        } else {
            assert_eq!(q.f1, 1.0, "{}: {:?}", q.id, q.error);
        }
    }
}

#[test]
fn categorizer_agrees_with_the_recorded_labels() {
    for r in support::dataset() {
        let q = parse_sparql(&r.gold_sparql).unwrap();
        assert_eq!(categorize(&q), r.category, "{}", r.id);
    }
}

#[test]
fn every_category_is_represented() {
    let seen: BTreeSet<Category> = support::dataset().iter().map(|r| r.category).collect();
    for c in [Category::Simple, Category::Medium, Category::Complex] {
        assert!(seen.contains(&c), "{c}");
    }
}

#[test]
fn gold_stage_without_gold_data_is_an_error() {
    let (store, lex) = (support::store(), support::lexicon());
    let mut rec = support::dataset().remove(0);
    rec.gold_sparql.clear();
    let exec = StoreExecutor { store: &store, now: support::now() };
    let ctx = PipelineContext {
        lexicon: &lex,
        rules: RuleConfig::default(),
        executor: &exec,
    };
    let err = run_pipeline(&rec, &[Stage::GtSparql].into(), &ctx).unwrap_err();
    assert!(matches!(err, PipelineError::MissingGoldStage { stage: Stage::GtSparql }));
}

#[test]
fn trace_records_each_stage() {
    let (store, lex) = (support::store(), support::lexicon());
    let rec = support::dataset().into_iter().find(|r| r.id == "cold-war-president").unwrap();
    let exec = StoreExecutor { store: &store, now: support::now() };
    let ctx = PipelineContext {
        lexicon: &lex,
        rules: RuleConfig::default(),
        executor: &exec,
    };
    let run = run_pipeline(&rec, &BTreeSet::new(), &ctx).unwrap();
    let t = &run.trace;
    assert!(t.amr.is_some() && t.lambda.is_some() && t.kb_lambda.is_some() && t.sparql.is_some());
    assert!(t.error.is_none());
    assert!(t.sparql.as_ref().unwrap().contains("FILTER"));
}

#[test]
fn ablation_scores_for_the_record() {
    let (store, lex) = (support::store(), support::corrupted_lexicon());
    for o in ablation_chain() {
        let label: Vec<&str> = o.iter().map(|s| s.as_str()).collect();
        let label = if label.is_empty() { "none".to_string() } else { label.join("+") };
        println!("{label:<40} {:.2}", macro_f1(&store, &lex, &o));
    }
}
