mod support;

use kbqa_core::{parse_penman, parse_sparql, render, serialize_penman};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const CONCEPTS: &[&str] = &["direct-01", "movie", "person", "name", "have-org-role-91", "amr-unknown", "date-entity"];
const ROLES: &[&str] = &[":arg0", ":arg1", ":arg2", ":mod", ":time", ":op1", ":arg1-of"];

/// PENMAN text for a random tree with occasional re-entrant references
/// and constant leaves.
fn random_amr(rng: &mut StdRng) -> String {
    fn node(rng: &mut StdRng, depth: usize, declared: &mut Vec<String>, out: &mut String) {
        let var = format!("v{}", declared.len());
        declared.push(var.clone());
        out.push_str(&format!("({var} / {}", CONCEPTS[rng.gen_range(0..CONCEPTS.len())]));
        let kids = if depth >= 3 { 0 } else { rng.gen_range(0..=3) };
        for _ in 0..kids {
            out.push_str(&format!(" {} ", ROLES[rng.gen_range(0..ROLES.len())]));
            match rng.gen_range(0..6) {
                0 => out.push_str(&format!("\"s{} x\"", rng.gen_range(0..5))),
                1 => out.push_str(&format!("{}", rng.gen_range(-3i64..2000))),
                2 => out.push_str(&declared[rng.gen_range(0..declared.len())].clone()),
                _ => node(rng, depth + 1, declared, out),
            }
        }
        out.push(')');
    }
    let mut out = String::new();
    node(rng, 0, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn penman_serialization_round_trips(seed in any::<u64>()) {
        let text = random_amr(&mut StdRng::seed_from_u64(seed));
        let g = parse_penman(&text).unwrap();
        let again = parse_penman(&serialize_penman(&g)).unwrap();
        prop_assert_eq!(&again, &g, "{}", text);
        prop_assert_eq!(serialize_penman(&again), serialize_penman(&g));
    }

    #[test]
    fn sparql_render_round_trips(seed in any::<u64>()) {
        let q = support::random_query(&mut StdRng::seed_from_u64(seed));
        let text = render(&q);
        let parsed = parse_sparql(&text).unwrap();
        prop_assert_eq!(&parsed.where_clause, &q.where_clause, "{}", text);
        prop_assert_eq!(render(&parsed), text);
    }
}

#[test]
fn gold_queries_round_trip() {
    for r in support::dataset() {
        let q = parse_sparql(&r.gold_sparql).unwrap();
        assert_eq!(parse_sparql(&render(&q)).unwrap(), q, "{}", r.id);
    }
}
