mod common;

use std::collections::BTreeSet;

use common::load_fixture;
use posetal_core::game::{
    joint_profiles, outcome, validate_game, GameError, MetricDecl, Player, PosetalGame, Profile, Violation,
};
use posetal_core::preference::{OutcomeVector, Preference};
use posetal_core::random::{conditions_game, random_game, ConditionsGameConfig, RandomGameConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURES: [&str; 3] = ["matching_pennies.json", "priority_conflict.json", "prisoner_cost.json"];

fn ov(pairs: &[(&str, f64)]) -> OutcomeVector {
    pairs.iter().map(|&(k, v)| (k, v)).collect()
}

fn chain(ids: &[&str]) -> Preference {
    let edges: Vec<(&str, &str)> = ids.windows(2).map(|w| (w[1], w[0])).collect();
    Preference::from_edges(ids, &edges).unwrap()
}

#[test]
fn bundled_fixtures_validate_and_round_trip() {
    for name in FIXTURES {
        let g = load_fixture(name);
        assert_eq!(validate_game(&g), vec![], "{name}");
        let once = g.to_json();
        let twice = PosetalGame::from_json(&once).unwrap().to_json();
        assert_eq!(once, twice, "{name}");
    }
}

#[test]
fn generated_games_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let mut g = random_game(&mut rng, &RandomGameConfig::default());
        // non-integer values exercise float formatting
        for idx in 0..g.num_profiles() {
            let prof = g.profile_at(idx);
            for i in 0..g.num_players() {
                let mut o = g.outcome_at(idx, i).unwrap().clone();
                let k = o.iter().next().unwrap().0.clone();
                o.insert(k, rng.gen_range(0.0..10.0));
                g.set_outcome(&prof, i, o).unwrap();
            }
        }
        let text = g.to_json();
        let back = PosetalGame::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let c = conditions_game(&mut rng, &ConditionsGameConfig::default());
        assert_eq!(PosetalGame::from_json(&c.to_json()).unwrap().to_json(), c.to_json());
    }
}

#[test]
fn outcome_lookup_on_pennies() {
    let g = load_fixture("matching_pennies.json");
    assert_eq!(outcome(&g, &[0, 0], "P1").unwrap(), &ov(&[("clearance", 1.0)]));
    assert_eq!(outcome(&g, &[0, 1], "P2").unwrap(), &ov(&[("neg_clearance", 1.0)]));
    assert!(matches!(outcome(&g, &[2, 0], "P1"), Err(GameError::ProfileNotFound(p)) if p == vec![2, 0]));
    assert!(matches!(outcome(&g, &[0], "P1"), Err(GameError::ProfileNotFound(_))));
    assert!(matches!(outcome(&g, &[0, 0], "P3"), Err(GameError::PlayerNotFound(_))));
}

#[test]
fn constant_zero_game() {
    let players = vec![
        Player::new("A", &["x", "y", "z"], chain(&["m"])),
        Player::new("B", &["u", "v"], chain(&["m"])),
    ];
    let g = PosetalGame::from_fn(vec![MetricDecl::joint("m")], players, true, |_, _| ov(&[("m", 0.0)])).unwrap();
    for p in joint_profiles(&g) {
        assert_eq!(outcome(&g, &p.0, "B").unwrap(), &ov(&[("m", 0.0)]));
    }
}

#[test]
fn profile_enumeration_order_and_counts() {
    let make = |sizes: &[usize]| {
        let players = sizes
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let acts: Vec<String> = (0..k).map(|a| format!("a{a}")).collect();
                Player { id: format!("P{i}"), actions: acts, preference: chain(&["m"]) }
            })
            .collect();
        PosetalGame::new(vec![MetricDecl::joint("m")], players, true).unwrap()
    };
    let g = make(&[2, 2]);
    let order: Vec<Vec<usize>> = joint_profiles(&g).into_iter().map(|p| p.0).collect();
    assert_eq!(order, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    for sizes in [vec![2, 3, 1], vec![5], vec![3, 1, 4, 2]] {
        let g = make(&sizes);
        let all: Vec<Profile> = joint_profiles(&g);
        let distinct: BTreeSet<Vec<usize>> = all.iter().map(|p| p.0.clone()).collect();
        assert_eq!(all.len(), sizes.iter().product::<usize>());
        assert_eq!(distinct.len(), all.len());
        let mut sorted = all.iter().map(|p| p.0.clone()).collect::<Vec<_>>();
        sorted.sort();
        assert_eq!(sorted, all.iter().map(|p| p.0.clone()).collect::<Vec<_>>());
    }
}

/// Personal metrics a player ranks, checked by comparing every pair of
/// profiles that agree on that player's action.
fn scope_oracle(g: &PosetalGame) -> usize {
    let profiles: Vec<Vec<usize>> = joint_profiles(g).into_iter().map(|p| p.0).collect();
    let mut bad = BTreeSet::new();
    for m in g.metrics().iter().filter(|m| m.scope == posetal_core::game::Scope::Personal) {
        for (i, p) in g.players().iter().enumerate() {
            if !p.preference.leaves().unwrap().contains(&m.id) {
                continue;
            }
            for a in &profiles {
                for b in &profiles {
                    if a[i] != b[i] {
                        continue;
                    }
                    let va = outcome(g, a, &p.id).unwrap().get(&m.id);
                    let vb = outcome(g, b, &p.id).unwrap().get(&m.id);
                    if va != vb {
                        bad.insert((m.id.clone(), i));
                    }
                }
            }
        }
    }
    bad.len()
}

#[test]
fn personal_scope_detection_matches_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let mut g = conditions_game(&mut rng, &ConditionsGameConfig::default());
        assert_eq!(scope_oracle(&g), 0);
        // perturb one personal value in one profile
        let idx = rng.gen_range(0..g.num_profiles());
        let i = rng.gen_range(0..g.num_players());
        let prof = g.profile_at(idx);
        let mut o = g.outcome_at(idx, i).unwrap().clone();
        let key = o.iter().map(|(k, _)| k.clone()).find(|k| k.starts_with('p'));
        let Some(key) = key else { continue };
        o.insert(key.clone(), o.get(&key).unwrap() + 1.0);
        g.set_outcome(&prof, i, o).unwrap();
        let expected = scope_oracle(&g);
        let found: BTreeSet<(String, String)> = validate_game(&g)
            .into_iter()
            .filter_map(|v| match v {
                Violation::ScopeViolation { metric, player, .. } => Some((metric, player)),
                _ => None,
            })
            .collect();
        assert_eq!(found.len(), expected);
    }
}

#[test]
fn missing_profile_is_the_only_violation() {
    let mut g = load_fixture("prisoner_cost.json");
    g.remove_outcome(&[1, 0], 0).unwrap();
    let v = validate_game(&g);
    assert_eq!(v.len(), 1);
    assert!(matches!(&v[0], Violation::MissingOutcome { .. }));
}

#[test]
fn malformed_files_are_rejected() {
    assert!(matches!(PosetalGame::from_json("{"), Err(GameError::Json(_))));
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/prisoner_cost.json")).unwrap();
    let broken = text.replacen("\"C/D\"", "\"C/X\"", 1);
    assert!(PosetalGame::from_json(&broken).is_err());
    let capped = PosetalGame::from_json_capped(&text, 3);
    assert!(matches!(capped, Err(GameError::TooLarge { profiles: 4, cap: 3 })));
}
