//! Golden cases: one AMR per translation rule and one rendered fragment per
//! SPARQL construct.

use kbqa_core::{emit, ground, parse_penman, render, translate, KbProfile, Lexicon};

pub const LEXICON: &str = r#"{
  "entities": {
    "Titanic": {"iri": "wd:Q44578"},
    "James Cameron": {"iri": "wd:Q42574"},
    "Leonardo DiCaprio": {"iri": "wd:Q38111"},
    "US president": {"iri": "wd:Q11696", "aliases": ["president"]},
    "cold war": {"iri": "wd:Q8683"},
    "Douglas Bravo": {"iri": "wd:Q4095606"},
    "France": {"iri": "wd:Q142"},
    "Obama": {"iri": "wd:Q76"},
    "Nobel": {"iri": "wd:Q7191"}
  },
  "relations": {
    "release-01": {"pid": "P577"},
    "direct-01": {"pid": "P57", "inverse": true},
    "star-01": {"pid": "P161", "inverse": true},
    "have-org-role-91": {"pid": "P39", "reified": true, "qualifiers": "start_end"},
    "play-01": {"pid": "P54", "reified": true, "qualifiers": "start_end"},
    "win-01": {"pid": "P166", "reified": true, "qualifiers": "point_in_time"},
    "have-03": {"pid": "P1082"}
  }
}"#;

pub const TITANIC_DIRECTOR: &str = r#"(d / direct-01 :arg0 (a / amr-unknown) :arg1 (m / movie :name (n / name :op1 "Titanic")))"#;
pub const TITANIC_RELEASE: &str = r#"(r / release-01 :arg1 (m / movie :name (n / name :op1 "Titanic")) :time (a / amr-unknown))"#;
pub const COLD_WAR: &str = r#"(h / have-org-role-91 :arg0 (a / amr-unknown) :arg2 (p / position :name (n / name :op1 "US" :op2 "president")) :time (w / war :name (n2 / name :op1 "cold" :op2 "war")))"#;
pub const TEENAGER: &str = r#"(h / have-org-role-91 :arg0 (a / amr-unknown) :arg2 (p / position :name (n / name :op1 "president")) :time (t / teenager :domain (p2 / person :name (n2 / name :op1 "Douglas" :op2 "Bravo"))))"#;
pub const COUNT: &str = r#"(d / direct-01 :arg0 (p / person :name (n / name :op1 "James" :op2 "Cameron")) :arg1 (m / movie :quant (a / amr-unknown)))"#;
pub const FIRST: &str = r#"(w / win-01 :arg0 (a / amr-unknown) :arg1 (a2 / award) :mod (f / first))"#;
pub const LAST: &str = r#"(w / win-01 :arg0 (a / amr-unknown) :arg1 (a2 / award) :mod (f / last))"#;
pub const MOST: &str = r#"(h / have-03 :arg0 (c / country :mod (a / amr-unknown)) :arg1 (p / population :arg1-of (h2 / have-quant-91 :arg3 (m / most))))"#;
pub const LEAST: &str = r#"(h / have-03 :arg0 (c / country :mod (a / amr-unknown)) :arg1 (p / population :arg1-of (h2 / have-quant-91 :arg3 (m / least))))"#;
pub const MORE: &str = r#"(h / have-03 :arg0 (a / amr-unknown) :arg1 (p / population :arg1-of (h2 / have-degree-91 :arg3 (m / more) :arg4 (p2 / population :arg1-of (h3 / have-03 :arg0 (c / country :name (n / name :op1 "France")))))))"#;
pub const LESS: &str = r#"(h / have-03 :arg0 (a / amr-unknown) :arg1 (p / population :arg1-of (h2 / have-degree-91 :arg3 (m / less) :arg4 (p2 / population :arg1-of (h3 / have-03 :arg0 (c / country :name (n / name :op1 "France")))))))"#;
pub const BEFORE: &str = r#"(p / play-01 :arg0 (a / amr-unknown) :time (b / before :op1 (w / win-01 :arg1 (x / award))))"#;
pub const AFTER: &str = r#"(p / play-01 :arg0 (a / amr-unknown) :time (b / after :op1 (w / win-01 :arg1 (x / award))))"#;
pub const NESTED_OVERLAP: &str = r#"(p / play-01 :arg0 (a / amr-unknown) :arg1 (t / team) :time (w / win-01 :arg0 (t2 / team) :arg1 (x / award)))"#;
pub const ORDINAL: &str = r#"(p / play-01 :arg0 (a / amr-unknown) :ord (o / ordinal-entity :value 2))"#;
pub const ORDINAL_LAST: &str = r#"(p / play-01 :arg0 (a / amr-unknown) :ord (o / ordinal-entity :value -1))"#;
pub const NOW: &str = r#"(p / play-01 :arg0 (a / amr-unknown) :time (n / now))"#;
pub const DATE: &str = r#"(p / play-01 :arg0 (a / amr-unknown) :time (d / date-entity :month 3 :day 12 :year 1947))"#;
pub const BOOLEAN: &str = r#"(w / win-01 :arg0 (p / person :name (n / name :op1 "Obama")) :arg1 (a / award :name (n2 / name :op1 "Nobel")))"#;

/// (rule, AMR, expected lambda expression).
pub const AMR_ROWS: &[(&str, &str, &str)] = &[
    ("base.frame", r#"(m / movie :mod (a / amr-unknown) :arg1-of (d / direct-01 :arg0 (p / person :name (n / name :op1 "James" :op2 "Cameron"))) :arg1-of (s / star-01 :arg0 (p2 / person :name (n2 / name :op1 "Leonardo" :op2 "DiCaprio"))))"#,
        r#"λm. direct-01(d, "James Cameron", m) ∧ star-01(s, "Leonardo DiCaprio", m)"#),
    ("base.projection", TITANIC_DIRECTOR, r#"λa. direct-01(d, a, "Titanic")"#),
    ("numerical.count", COUNT, r#"count(λm. direct-01(d, "James Cameron", m))"#),
    ("numerical.first", FIRST, "min(λa. win-01(w, a, a2), 0, 1)"),
    ("numerical.last", LAST, "max(λa. win-01(w, a, a2), 0, 1)"),
    ("numerical.most", MOST, "argmax(λc. have-03(h, c, p), λc.λp. ⊤, 0, 1)"),
    ("numerical.least", LEAST, "argmin(λc. have-03(h, c, p), λc.λp. ⊤, 0, 1)"),
    ("numerical.more", MORE, r#"λa. have-03(h, a, p) ∧ have-03(h3, "France", p2) ∧ cmp(p, p2, >)"#),
    ("numerical.less", LESS, r#"λa. have-03(h, a, p) ∧ have-03(h3, "France", p2) ∧ cmp(p, p2, <)"#),
    ("temporal.when", TITANIC_RELEASE, r#"λer. release-01(r, :arg1 "Titanic") ∧ interval(er, r)"#),
    ("temporal.before", BEFORE,
        "argmax(λa. play-01(p, a), λa.λep. win-01(w, :arg1 x) ∧ interval(ep, p) ∧ interval(ew, w) ∧ before(ep, ew), 0, 1)"),
    ("temporal.after", AFTER,
        "argmin(λa. play-01(p, a), λa.λep. win-01(w, :arg1 x) ∧ interval(ep, p) ∧ interval(ew, w) ∧ after(ep, ew), 0, 1)"),
    ("temporal.overlap", NESTED_OVERLAP,
        "λa. play-01(p, a, t) ∧ win-01(w, t2, x) ∧ interval(ep, p) ∧ interval(ew, w) ∧ overlap(ep, ew)"),
    ("temporal.ordinal", ORDINAL, "argmin(λa. play-01(p, a), λa.λep. interval(ep, p), 1, 1)"),
    ("temporal.ordinal.last", ORDINAL_LAST, "argmax(λa. play-01(p, a), λa.λep. interval(ep, p), 0, 1)"),
    ("temporal.now", NOW, "λa. play-01(p, a) ∧ interval(ep, p) ∧ interval(en, now()) ∧ overlap(ep, en)"),
    ("temporal.date", DATE, r#"λa. play-01(p, a) ∧ interval(ed, date("12-03-1947")) ∧ interval(ep, p) ∧ overlap(ep, ed)"#),
    ("temporal.teenager", TEENAGER,
        r#"λa. have-org-role-91(h, :arg0 a, :arg2 "president") ∧ interval(eh, h) ∧ teenager(ep2, "Douglas Bravo") ∧ overlap(eh, ep2)"#),
];

/// Translates every AMR row and compares the lambda form and the trace.
pub fn check_amr_rows() -> Result<(), String> {
    let mut failures = Vec::new();
    for (rule, amr, expected) in AMR_ROWS {
        let t = translate(&parse_penman(amr).unwrap()).unwrap_or_else(|e| panic!("{rule}: {e}"));
        let got = t.expr.pretty();
        if got != *expected {
            failures.push(format!("{rule}:\n  got      {got}\n  expected {expected}"));
        }
        if !t.applied.iter().any(|a| a.rule == *rule) {
            failures.push(format!("{rule}: trace {:?} lacks the rule", t.applied.iter().map(|a| &a.rule).collect::<Vec<_>>()));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("\n"))
    }
}

pub fn sparql(amr: &str) -> String {
    let lex = Lexicon::from_json(LEXICON).unwrap();
    let kb = KbProfile::wikidata();
    let t = translate(&parse_penman(amr).unwrap()).unwrap();
    let q = emit(&ground(&t.expr, &lex, &kb).unwrap(), &kb).unwrap();
    render(&q).split_whitespace().collect::<Vec<_>>().join(" ")
}

/// (construct, AMR, fragments expected in the rendered query).
pub const SPARQL_ROWS: &[(&str, &str, &[&str])] = &[
    ("projection", TITANIC_DIRECTOR, &["SELECT DISTINCT ?a WHERE"]),
    ("count", COUNT, &["SELECT (COUNT(?m) AS ?c) WHERE"]),
    ("argmin", ORDINAL, &["ORDER BY (?epStart) LIMIT 1 OFFSET 1"]),
    ("argmax", ORDINAL_LAST, &["ORDER BY DESC(?epStart) LIMIT 1 OFFSET 0"]),
    ("min", FIRST, &["BIND (?a AS ?aStart)", "ORDER BY (?aStart) LIMIT 1 OFFSET 0"]),
    ("max", LAST, &["BIND (?a AS ?aStart)", "ORDER BY DESC(?aStart) LIMIT 1 OFFSET 0"]),
    ("kb predicate", TITANIC_DIRECTOR, &["wd:Q44578 wdt:P57 ?a."]),
    ("reified interval", COLD_WAR, &["?a p:P39 ?h.", "?h ps:P39 wd:Q11696.", "?h pq:P580 ?ehStart.", "?h pq:P582 ?ehEnd."]),
    ("plain interval", TITANIC_RELEASE, &["wd:Q44578 wdt:P577 ?xr.", "BIND (?xr AS ?erStart)", "BIND (?xr AS ?erEnd)"]),
    ("now", NOW, &["BIND (now() AS ?enStart)", "BIND (now() AS ?enEnd)"]),
    ("overlap", COLD_WAR, &["FILTER(?ehStart<=?ewEnd && ?ewStart<=?ehEnd)"]),
    ("before", BEFORE, &["FILTER(?epEnd<=?ewStart)"]),
    ("after", AFTER, &["FILTER(?epStart>=?ewEnd)"]),
];

/// Renders every SPARQL row and looks for its fragments.
pub fn check_sparql_rows() -> Result<(), String> {
    let mut failures = Vec::new();
    for (name, amr, fragments) in SPARQL_ROWS {
        let text = sparql(amr);
        for f in *fragments {
            if !text.contains(f) {
                failures.push(format!("{name}: `{f}` not in\n  {text}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("\n"))
    }
}
