//! Acceptance checks. Prints one PASS or FAIL line per criterion and exits
//! non-zero when any fails.

mod common;
#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use kbqa_core::harness::categorize;
use kbqa_core::rdf::Duration;
use kbqa_core::sparql::IntervalRelation;
use kbqa_core::{eval, eval_bruteforce, parse_sparql};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn worked_examples() -> Outcome {
    let store = support::store();
    ensure(store.len() <= 200, || format!("fixture has {} triples", store.len()))?;
    let (lex, data) = (support::lexicon(), support::dataset());
    let started = Instant::now();
    for id in support::WORKED {
        let rec = data.iter().find(|r| r.id == id).ok_or(format!("{id} missing"))?;
        support::check_worked_example(rec, &store, &lex)?;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3}s"))?;
    Ok(format!("5 examples on {} triples in {secs:.3}s", store.len()))
}

fn eval_json(overrides: &str, lexicon: &str) -> Result<Value, String> {
    let mut args = vec![
        "eval", "--gold", &support_path("dataset.jsonl"), "--store", &support_path("kb.nt"),
        "--lexicon", lexicon, "--format", "json", "--now", NOW,
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    if !overrides.is_empty() {
        args.extend(["--override".to_string(), overrides.to_string()]);
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = kbqa(&args);
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn support_path(name: &str) -> String {
    support::fixture_path(name).display().to_string()
}

fn gt_sparql() -> Outcome {
    let v = eval_json("GT_SPARQL", &support_path("lexicon_corrupted.json"))?;
    let prf = [&v["precision"], &v["recall"], &v["f1"]].map(|x| x.as_f64());
    ensure(prf == [Some(1.0); 3], || format!("macro P/R/F1 = {prf:?}"))?;
    Ok("macro P = R = F1 = 1.0".into())
}

fn ablation() -> Outcome {
    let chain = ["", "GT_EL", "GT_EL,GT_RL", "GT_EL,GT_RL,GT_KB_LAMBDA", "GT_EL,GT_RL,GT_KB_LAMBDA,GT_SPARQL"];
    let lex = support_path("lexicon_corrupted.json");
    let mut scores = Vec::new();
    for o in chain {
        scores.push(eval_json(o, &lex)?["f1"].as_f64().ok_or("no f1")?);
    }
    let shown: Vec<String> = scores.iter().map(|s| format!("{s:.2}")).collect();
    ensure(scores.windows(2).all(|w| w[0] <= w[1]), || format!("not monotone: {}", shown.join(" -> ")))?;
    Ok(shown.join(" -> "))
}

fn rule_tables() -> Outcome {
    support::golden::check_amr_rows()?;
    support::golden::check_sparql_rows()?;
    Ok(format!(
        "{} AMR rows, {} SPARQL rows",
        support::golden::AMR_ROWS.len(),
        support::golden::SPARQL_ROWS.len()
    ))
}

fn oracle() -> Outcome {
    let started = Instant::now();
    let mut largest = 0;
    for seed in 0..100u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let store = support::random_store(&mut rng, 1000);
        largest = largest.max(store.len());
        let q = support::random_query(&mut rng);
        let fast = eval(&q, &store, support::now()).map_err(|e| e.to_string())?;
        let slow = eval_bruteforce(&q, &store, support::now()).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("seed {seed} disagrees on\n{q}"))?;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("100 instances, stores up to {largest} triples, {secs:.1}s"))
}

fn temporal() -> Outcome {
    use support::{day, interval_holds as holds};
    let mut rng = StdRng::seed_from_u64(7);
    let span = |rng: &mut StdRng| {
        let s = rng.gen_range(0..400);
        (day(s), day(s + rng.gen_range(0..60)))
    };
    for i in 0..500 {
        let (a, b) = (span(&mut rng), span(&mut rng));
        ensure(holds(IntervalRelation::Overlap, a, b) == holds(IntervalRelation::Overlap, b, a), || format!("overlap not symmetric at {i}"))?;
        ensure(holds(IntervalRelation::Before, a, b) == holds(IntervalRelation::After, b, a), || format!("before/after not converse at {i}"))?;
        ensure(holds(IntervalRelation::Overlap, a, a), || format!("overlap not reflexive at {i}"))?;
        let gap = chrono::Duration::days(rng.gen_range(1..100));
        let later = (a.1 + gap, a.1 + gap + chrono::Duration::days(rng.gen_range(0..60)));
        ensure(!holds(IntervalRelation::Overlap, a, later), || format!("strict gap overlaps at {i}"))?;
    }
    let leap = Duration::parse("P13Y")
        .and_then(|d| d.add_to("2000-02-29T00:00:00Z".parse().expect("valid instant")))
        .map(|t| t.date_naive().to_string());
    ensure(leap.as_deref() == Some("2013-02-28"), || format!("2000-02-29 + P13Y = {leap:?}"))?;
    Ok("500 generated pairs; 2000-02-29 + P13Y = 2013-02-28".into())
}

fn categorizer() -> Outcome {
    let data = support::dataset();
    let mut got = Vec::new();
    for (id, want) in [("titanic-release", "SIMPLE"), ("cold-war-president", "MEDIUM"), ("douglas-bravo-teenager", "COMPLEX")] {
        let rec = data.iter().find(|r| r.id == id).ok_or(format!("{id} missing"))?;
        let q = parse_sparql(&rec.gold_sparql).map_err(|e| e.to_string())?;
        let c = categorize(&q).to_string();
        ensure(c == want, || format!("{id}: {c}, expected {want}"))?;
        got.push(c);
    }
    Ok(got.join("/"))
}

fn determinism() -> Outcome {
    let cases = determinism_cases();
    for case in &cases {
        let args: Vec<&str> = case.iter().map(String::as_str).collect();
        let (a, b) = (kbqa(&args), kbqa(&args));
        ensure(a.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&a.stderr)))?;
        ensure(a.stdout == b.stdout, || format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} invocations byte-identical", cases.len()))
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("worked-example equivalence", worked_examples),
        ("GT_SPARQL ablation row", gt_sparql),
        ("ablation monotonicity", ablation),
        ("rule-table golden suite", rule_tables),
        ("oracle equivalence", oracle),
        ("temporal algebra", temporal),
        ("categorizer", categorizer),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
