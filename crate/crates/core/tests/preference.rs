mod common;

use posetal_core::order::Poset;
use posetal_core::preference::{
    aggregate_value, compare_outcomes, compare_preferences, AggregationMap, ComparisonResult, Preference,
    RefinementEvidence,
};
use posetal_core::random::{random_poset, random_refinement_ops};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i}")).collect()
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    if rng.gen_bool(0.5) {
        (0..n).map(|_| rng.gen_range(0..3) as f64).collect()
    } else {
        (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()
    }
}

#[test]
fn chains_compare_lexicographically() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=6);
        let m = ids(n);
        // m0 on top
        let edges: Vec<(String, String)> = (1..n).map(|i| (m[i].clone(), m[i - 1].clone())).collect();
        let pref = Preference::new(Poset::new(m.clone(), edges).unwrap());
        let (x, y) = (random_values(&mut rng, n), random_values(&mut rng, n));
        let got = compare_outcomes(&pref, &common::vector(&m, &x), &common::vector(&m, &y)).unwrap();
        assert_eq!(got, common::lexicographic(&x, &y), "{x:?} {y:?}");
    }
}

#[test]
fn antichains_compare_by_pareto_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=6);
        let m = ids(n);
        let pref = Preference::new(Poset::new(m.clone(), Vec::<(String, String)>::new()).unwrap());
        let (x, y) = (random_values(&mut rng, n), random_values(&mut rng, n));
        let got = compare_outcomes(&pref, &common::vector(&m, &x), &common::vector(&m, &y)).unwrap();
        assert_eq!(got, common::pareto(&x, &y), "{x:?} {y:?}");
    }
}

#[test]
fn compiled_comparison_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5_000 {
        let n = rng.gen_range(1..=7);
        let m = ids(n);
        let density = rng.gen_range(0.0..1.0);
        let pref = Preference::new(random_poset(&mut rng, &m, density));
        let (x, y) = (random_values(&mut rng, n), random_values(&mut rng, n));
        let (x, y) = (common::vector(&m, &x), common::vector(&m, &y));
        assert_eq!(compare_outcomes(&pref, &x, &y).unwrap(), common::compare(&pref, &x, &y));
    }
}

#[test]
fn induced_order_is_transitive_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut findings = Vec::new();
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=6);
        let m = ids(n);
        let density = rng.gen_range(0.0..1.0);
        let pref = Preference::new(random_poset(&mut rng, &m, density));
        let v: Vec<_> = (0..3).map(|_| common::vector(&m, &random_values(&mut rng, n))).collect();
        let le = |a: usize, b: usize| compare_outcomes(&pref, &v[a], &v[b]).unwrap().first_weakly_preferred();
        if le(0, 1) && le(1, 2) && !le(0, 2) {
            findings.push(format!("{pref}: {:?}", v));
        }
    }
    assert!(findings.is_empty(), "transitivity counterexamples: {findings:#?}");
}

#[test]
fn operations_refine_on_random_preferences() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let spare = vec!["s0".to_string(), "s1".to_string()];
    for case in 0..300 {
        let n = rng.gen_range(1..=5);
        let density = rng.gen_range(0.0..1.0);
        let base = Preference::new(random_poset(&mut rng, &ids(n), density));
        let ops = random_refinement_ops(&mut rng, &base, &spare, 3);
        let mut cur = base.clone();
        for op in &ops {
            let next = cur.apply(op).unwrap();
            let ev = compare_preferences(&cur, &next, 300, case).unwrap();
            assert!(matches!(ev, RefinementEvidence::RefinesSampled { .. }), "{op:?} on {cur}: {ev:?}");
            cur = next;
        }
        // refinement composes
        assert!(!compare_preferences(&base, &cur, 300, case).unwrap().is_refuted());
    }
}

proptest! {
    #[test]
    fn comparison_is_reflexive_and_swaps(
        edges in proptest::collection::vec((0usize..5, 0usize..5), 0..6),
        x in proptest::collection::vec(-3i32..3, 5),
        y in proptest::collection::vec(-3i32..3, 5),
    ) {
        let m = ids(5);
        let forward: Vec<(String, String)> = edges
            .into_iter()
            .filter(|(a, b)| a < b)
            .map(|(a, b)| (m[a].clone(), m[b].clone()))
            .collect();
        let pref = Preference::new(Poset::new(m.clone(), forward).unwrap());
        let xv = common::vector(&m, &x.iter().map(|&v| v as f64).collect::<Vec<_>>());
        let yv = common::vector(&m, &y.iter().map(|&v| v as f64).collect::<Vec<_>>());
        prop_assert_eq!(compare_outcomes(&pref, &xv, &xv).unwrap(), ComparisonResult::Indifferent);
        prop_assert_eq!(
            compare_outcomes(&pref, &xv, &yv).unwrap(),
            compare_outcomes(&pref, &yv, &xv).unwrap().swap()
        );
    }

    #[test]
    fn combiner_is_strictly_monotone(
        a in 0.01f64..10.0, b in 0.01f64..10.0,
        v1 in -100.0f64..100.0, v2 in -100.0f64..100.0,
        d1 in 0.0f64..5.0, d2 in 0.0f64..5.0,
        which in 0usize..3,
    ) {
        let agg = AggregationMap::weighted("p", "q", a, b).unwrap();
        let (d1, d2) = match which { 0 => (d1 + 0.5, d2), 1 => (d1, d2 + 0.5), _ => (d1 + 0.5, d2 + 0.5) };
        prop_assert!(aggregate_value(&agg, v1 - d1, v2 - d2) < aggregate_value(&agg, v1, v2));
    }
}
