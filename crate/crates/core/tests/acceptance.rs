//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use posetal_core::driving::{self, preference_preset, Scenario, DEFAULT_PROFILE_CAP};
use posetal_core::existence::{
    build_potential, check_condition1, check_condition2, check_existence_conditions, potential_minima,
    verify_potential, CommunalMode, PotentialWeights,
};
use posetal_core::game::{validate_game, PosetalGame};
use posetal_core::order::Poset;
use posetal_core::preference::{compare_outcomes, Preference};
use posetal_core::random::{
    conditions_game, random_game, random_refinement_ops, spare_metric_id, ConditionsGameConfig, RandomGameConfig,
};
use posetal_core::solver::{
    check_admissible_rank_dominance, check_refinement_theorem, EquilibriumSet, EvaluatedGame, RankDominance,
    RankDominanceMode, RankReference,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome { pass, detail, elapsed: start.elapsed() }
}

/// Games solved by the suites, kept for the checks that run over all of them.
#[derive(Default)]
struct Solved {
    games: Vec<(String, PosetalGame)>,
}

impl Solved {
    fn add(&mut self, label: String, g: PosetalGame) {
        self.games.push((label, g));
    }
}

fn load(name: &str) -> PosetalGame {
    common::load_fixture(name)
}

fn criterion1() -> (bool, String) {
    let g = load("matching_pennies.json");
    let eq = EvaluatedGame::new(&g).unwrap().equilibria();
    let c1 = check_condition1(&g, CommunalMode::Unilateral).unwrap();
    let pair = c1.witness().map(|w| {
        let mut p = [w.improved.clone(), w.worsened.clone()];
        p.sort();
        p
    });
    let expected = ["clearance".to_string(), "neg_clearance".to_string()];
    let pass = eq.weak.is_empty() && eq.strict.is_empty() && pair.as_ref() == Some(&expected);
    (pass, format!("weak {}, strict {}, condition 1 witness {:?}", eq.weak.len(), eq.strict.len(), pair))
}

fn criterion2() -> (bool, String) {
    let g = load("priority_conflict.json");
    let eq = EvaluatedGame::new(&g).unwrap().equilibria();
    let c2 = check_condition2(&g);
    let pass = eq.weak.is_empty() && !c2.holds();
    (pass, format!("weak {}, condition 2 witness {:?}", eq.weak.len(), c2.witness()))
}

fn criterion3(solved: &mut Solved) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let cfg = RandomGameConfig::default();
    let mut mismatches = 0;
    let mut first = None;
    for k in 0..1000 {
        let g = random_game(&mut rng, &cfg);
        let eq = EvaluatedGame::new(&g).unwrap().equilibria();
        let oracle = common::equilibria(&g);
        let ok = common::to_profiles(&g, &eq.weak) == oracle.weak
            && common::to_profiles(&g, &eq.strict) == oracle.strict
            && common::to_profiles(&g, &eq.admissible) == oracle.admissible;
        if !ok {
            mismatches += 1;
            first.get_or_insert(k);
        }
        solved.add(format!("random game #{k}"), g);
    }
    (mismatches == 0, format!("1000 games, {mismatches} mismatches, first {first:?}"))
}

fn criterion4(solved: &mut Solved) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let cfg = RandomGameConfig::default();
    let spare: Vec<String> = (0..cfg.spare_metrics).map(spare_metric_id).collect();
    let mut violations = 0;
    let mut ops_total = 0;
    for k in 0..500 {
        let g = random_game(&mut rng, &cfg);
        let prefs: Vec<Preference> = g
            .players()
            .iter()
            .map(|p| {
                let n = rng.gen_range(1..=4);
                let ops = random_refinement_ops(&mut rng, &p.preference, &spare, n);
                ops_total += ops.len();
                p.preference.apply_all(&ops).unwrap()
            })
            .collect();
        let refined = g.with_preferences(prefs).unwrap();
        if !check_refinement_theorem(&g, &refined).unwrap().holds() {
            violations += 1;
        }
        solved.add(format!("refinement case #{k} (original)"), g);
        solved.add(format!("refinement case #{k} (refined)"), refined);
    }
    (violations == 0, format!("500 cases, {ops_total} operations, {violations} violations"))
}

fn criterion5(solved: &mut Solved) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let cfg = ConditionsGameConfig::default();
    let mut failures = Vec::new();
    for k in 0..200 {
        let g = conditions_game(&mut rng, &cfg);
        let ok = (|| {
            let report = check_existence_conditions(&g, CommunalMode::Unilateral).ok()?;
            if !report.conditions_hold() {
                return None;
            }
            let pot = build_potential(&g, &PotentialWeights::new(), CommunalMode::Unilateral).ok()?;
            if !verify_potential(&g, &pot).ok()?.holds() {
                return None;
            }
            let weak = EvaluatedGame::new(&g).ok()?.equilibria().weak;
            let minima = potential_minima(&g, &pot);
            (!weak.is_empty() && minima.iter().all(|m| weak.binary_search(m).is_ok())).then_some(())
        })();
        if ok.is_none() {
            failures.push(k);
        }
        solved.add(format!("conditions game #{k}"), g);
    }
    (failures.is_empty(), format!("200 games, {} failures {:?}", failures.len(), failures))
}

fn criterion6(solved: &Solved) -> (bool, String) {
    let mut games = 0;
    let mut pairs = 0;
    let mut violations = 0;
    let mut first: Option<String> = None;
    let mut dominating_violations = 0;
    for (label, g) in &solved.games {
        let ev = EvaluatedGame::new(g).unwrap();
        let eq = ev.equilibria();
        games += 1;
        let non_adm: Vec<usize> =
            eq.weak.iter().copied().filter(|w| eq.admissible.binary_search(w).is_err()).collect();
        // count every violating pair, then keep the checker's first report
        let minima = ev.reference_minima(RankReference::Declared);
        for &d in &non_adm {
            let rd = ev.common_rank_with(d, &minima).per_player;
            for &a in &eq.admissible {
                pairs += 1;
                let ra = ev.common_rank_with(a, &minima).per_player;
                if (0..g.num_players()).any(|i| rd[i] > ra[i]) {
                    violations += 1;
                }
            }
        }
        if let RankDominance::Violation(v) =
            check_admissible_rank_dominance(&ev, &eq, RankReference::Declared, RankDominanceMode::AllPairs)
        {
            if first.is_none() {
                first = Some(format!(
                    "{label}: non-admissible {} vs admissible {}, player {} rank {} > {}\n  game: {}",
                    g.profile_key(&v.dominated.0),
                    g.profile_key(&v.admissible.0),
                    g.players()[v.player].id,
                    v.rank_dominated,
                    v.rank_admissible,
                    serde_json::from_str::<serde_json::Value>(&g.to_json()).unwrap()
                ));
            }
        }
        if !check_admissible_rank_dominance(&ev, &eq, RankReference::Declared, RankDominanceMode::DominatingPairs)
            .holds()
        {
            dominating_violations += 1;
        }
    }
    let mut detail = format!(
        "{games} games, {pairs} (non-admissible, admissible) pairs, {violations} violating pairs; \
         restricted to pairs where the admissible NE dominates: {dominating_violations} games with violations"
    );
    if let Some(f) = first {
        detail.push_str("\n  first counterexample: ");
        detail.push_str(&f);
    }
    (violations == 0, detail)
}

fn criterion7() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut bad = 0;
    let value = |rng: &mut ChaCha8Rng| -> f64 {
        if rng.gen_bool(0.5) {
            rng.gen_range(0..3) as f64
        } else {
            rng.gen_range(-5.0..5.0)
        }
    };
    for chain in [true, false] {
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=6);
            let ids: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
            let edges: Vec<(String, String)> =
                if chain { (1..n).map(|i| (ids[i].clone(), ids[i - 1].clone())).collect() } else { Vec::new() };
            let pref = Preference::new(Poset::new(ids.clone(), edges).unwrap());
            let x: Vec<f64> = (0..n).map(|_| value(&mut rng)).collect();
            let y: Vec<f64> = (0..n).map(|_| value(&mut rng)).collect();
            let got = compare_outcomes(&pref, &common::vector(&ids, &x), &common::vector(&ids, &y)).unwrap();
            let want = if chain { common::lexicographic(&x, &y) } else { common::pareto(&x, &y) };
            if got != want {
                bad += 1;
            }
        }
    }
    (bad == 0, format!("10000 chain + 10000 antichain pairs, {bad} disagreements"))
}

fn criterion8(solved: &Solved) -> (bool, String) {
    let mut bad = Vec::new();
    for (label, g) in &solved.games {
        let eq: EquilibriumSet = EvaluatedGame::new(g).unwrap().equilibria();
        let weak: BTreeSet<usize> = eq.weak.iter().copied().collect();
        if !eq.strict.iter().chain(&eq.admissible).all(|p| weak.contains(p)) {
            bad.push(label.clone());
        }
    }
    (bad.is_empty(), format!("{} games, {} containment failures {:?}", solved.games.len(), bad.len(), bad))
}

fn criterion9(solved: &mut Solved) -> (bool, String) {
    let sc = Scenario::intersection();
    let trajectories = match driving::generate_all(&sc) {
        Ok(t) => t,
        Err(e) => return (false, e.to_string()),
    };
    let sizes: Vec<usize> = trajectories.iter().map(Vec::len).collect();
    let mut counts = Vec::new();
    let mut valid = true;
    for chain in [["A", "D", "D"], ["B", "D", "D"], ["C", "E", "E"]] {
        let prefs = chain.iter().map(|n| preference_preset(n).unwrap()).collect();
        let g = driving::build_driving_game(&sc, &trajectories, prefs, DEFAULT_PROFILE_CAP).unwrap();
        valid &= validate_game(&g).is_empty();
        let eq = EvaluatedGame::new(&g).unwrap().equilibria();
        counts.push((chain.concat(), eq.weak.len(), eq.strict.len(), eq.admissible.len()));
        solved.add(format!("driving {}", chain.concat()), g);
    }
    let shrinking = counts.windows(2).all(|w| w[1].1 <= w[0].1);
    let sized = sizes.iter().all(|n| (20..=40).contains(n));
    let detail = format!(
        "trajectories {sizes:?}, valid {valid}, (weak, strict, admissible) {}",
        counts.iter().map(|(c, w, s, a)| format!("{c}: ({w}, {s}, {a})")).collect::<Vec<_>>().join(", ")
    );
    (shrinking && sized && valid, detail)
}

fn criterion10() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut bad = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=8);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let density = rng.gen_range(0.0..0.7);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(density) {
                    edges.push((perm[a], perm[b]));
                }
            }
        }
        let ids: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        let p = Poset::new(ids.clone(), edges.iter().map(|&(a, b)| (ids[a].clone(), ids[b].clone()))).unwrap();
        let reach = common::reachable(n, &edges);
        let all: Vec<usize> = (0..n).collect();
        let mut ok = p.total_height() == common::max_chain(&reach, &all);
        for a in 0..n {
            let upper: Vec<usize> = (0..n).filter(|&b| reach[a][b]).collect();
            let upper_ids: BTreeSet<String> = upper.iter().map(|&b| ids[b].clone()).collect();
            ok &= p.upper_closure(&ids[a]).unwrap() == upper_ids;
            ok &= p.rank_of(&ids[a]).unwrap() == common::max_chain(&reach, &upper);
            ok &= (0..n).all(|b| p.leq(&ids[a], &ids[b]).unwrap() == reach[a][b]);
        }
        if !ok {
            bad += 1;
        }
    }
    (bad == 0, format!("10000 DAGs, {bad} disagreements"))
}

fn main() {
    let mut solved = Solved::default();
    let mut results: Vec<(usize, &str, Option<Duration>, Outcome)> = Vec::new();
    results.push((1, "matching-pennies counterexample", Some(Duration::from_secs(1)), timed(criterion1)));
    results.push((2, "priority-conflict counterexample", Some(Duration::from_secs(1)), timed(criterion2)));
    results.push((3, "solver vs brute-force oracle", Some(Duration::from_secs(60)), timed(|| criterion3(&mut solved))));
    results.push((4, "refinement shrinks weak NE", None, timed(|| criterion4(&mut solved))));
    results.push((5, "existence on condition-satisfying games", None, timed(|| criterion5(&mut solved))));
    let c9 = timed(|| criterion9(&mut solved));
    results.push((6, "admissible NE rank dominance", None, timed(|| criterion6(&solved))));
    results.push((7, "chain = lexicographic, antichain = Pareto", None, timed(criterion7)));
    results.push((8, "strict and admissible NE are weak NE", None, timed(|| criterion8(&solved))));
    results.push((9, "driving intersection along the preset chain", Some(Duration::from_secs(60)), c9));
    results.push((10, "poset rank/height/closure vs chain enumeration", None, timed(criterion10)));

    let mut failed = 0;
    for (n, name, limit, out) in &results {
        let in_time = limit.map_or(true, |l| out.elapsed <= l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(", limit {:.0} s", l.as_secs_f64()));
        println!(
            "{} {:>2} {name}: {} ({:.2} s{budget})",
            if pass { "PASS" } else { "FAIL" },
            n,
            out.detail,
            out.elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
