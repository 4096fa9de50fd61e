//! Definition-level reference implementations used to cross-check the
//! library. Nothing here shares code with the optimized paths beyond
//! reading the game table.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use posetal_core::game::PosetalGame;
use posetal_core::preference::{ComparisonResult, OutcomeVector, Preference};

/// Reachability over raw edges by depth-first search (reflexive).
pub fn reachable(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(adj[v].iter().copied());
                }
            }
            seen
        })
        .collect()
}

/// Largest subset of `within` that is totally ordered, by enumerating subsets.
pub fn max_chain(reach: &[Vec<bool>], within: &[usize]) -> usize {
    let k = within.len();
    let mut best = 0;
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| within[b]).collect();
        let chain = members
            .iter()
            .all(|&a| members.iter().all(|&b| a == b || reach[a][b] || reach[b][a]));
        if chain {
            best = best.max(members.len());
        }
    }
    best
}

/// `x ≾ y` straight from the definition, using string lookups.
pub fn weakly_preferred(pref: &Preference, x: &OutcomeVector, y: &OutcomeVector) -> bool {
    let poset = pref.poset();
    let val = |o: &OutcomeVector, m: &str| pref.eval(m, o).unwrap();
    poset.nodes().iter().all(|m| {
        val(x, m) <= val(y, m)
            || poset
                .nodes()
                .iter()
                .any(|h| poset.lt(m, h).unwrap() && val(x, h) < val(y, h))
    })
}

pub fn compare(pref: &Preference, x: &OutcomeVector, y: &OutcomeVector) -> ComparisonResult {
    match (weakly_preferred(pref, x, y), weakly_preferred(pref, y, x)) {
        (true, false) => ComparisonResult::FirstPreferred,
        (false, true) => ComparisonResult::SecondPreferred,
        (true, true) => ComparisonResult::Indifferent,
        (false, false) => ComparisonResult::Uncomparable,
    }
}

fn out<'g>(g: &'g PosetalGame, prof: &[usize], i: usize) -> &'g OutcomeVector {
    g.outcome_at(g.profile_index(prof), i).unwrap()
}

fn with(prof: &[usize], i: usize, a: usize) -> Vec<usize> {
    let mut p = prof.to_vec();
    p[i] = a;
    p
}

pub fn all_profiles(g: &PosetalGame) -> Vec<Vec<usize>> {
    let mut all = vec![vec![]];
    for p in g.players() {
        all = all
            .into_iter()
            .flat_map(|pre| {
                (0..p.actions.len()).map(move |a| {
                    let mut v = pre.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    all
}

#[derive(Debug, PartialEq, Eq)]
pub struct OracleEquilibria {
    pub weak: BTreeSet<Vec<usize>>,
    pub strict: BTreeSet<Vec<usize>>,
    pub admissible: BTreeSet<Vec<usize>>,
}

pub fn equilibria(g: &PosetalGame) -> OracleEquilibria {
    let players = g.players();
    let cmp = |i: usize, a: &[usize], b: &[usize]| compare(&players[i].preference, out(g, a, i), out(g, b, i));
    let mut weak = BTreeSet::new();
    let mut strict = BTreeSet::new();
    for prof in all_profiles(g) {
        let is_weak = (0..players.len()).all(|i| {
            (0..players[i].actions.len())
                .all(|a| cmp(i, &with(&prof, i, a), &prof) != ComparisonResult::FirstPreferred)
        });
        let is_strict = (0..players.len()).all(|i| {
            (0..players[i].actions.len())
                .filter(|&a| a != prof[i])
                .all(|a| cmp(i, &prof, &with(&prof, i, a)) == ComparisonResult::FirstPreferred)
        });
        if is_weak {
            weak.insert(prof.clone());
        }
        if is_strict {
            strict.insert(prof);
        }
    }
    let admissible = weak
        .iter()
        .filter(|&w| {
            !weak.iter().any(|v| {
                let rs: Vec<ComparisonResult> = (0..players.len()).map(|i| cmp(i, v, w)).collect();
                rs.iter().all(|r| r.first_weakly_preferred())
                    && rs.iter().any(|r| *r == ComparisonResult::FirstPreferred)
            })
        })
        .cloned()
        .collect();
    OracleEquilibria { weak, strict, admissible }
}

pub fn to_profiles(g: &PosetalGame, idx: &[usize]) -> BTreeSet<Vec<usize>> {
    idx.iter().map(|&i| g.profile_at(i)).collect()
}

/// Lexicographic comparison from the first entry down.
pub fn lexicographic(x: &[f64], y: &[f64]) -> ComparisonResult {
    for (a, b) in x.iter().zip(y) {
        if a < b {
            return ComparisonResult::FirstPreferred;
        }
        if a > b {
            return ComparisonResult::SecondPreferred;
        }
    }
    ComparisonResult::Indifferent
}

/// Weak Pareto dominance (all coordinates no worse).
pub fn pareto(x: &[f64], y: &[f64]) -> ComparisonResult {
    let le = x.iter().zip(y).all(|(a, b)| a <= b);
    let ge = x.iter().zip(y).all(|(a, b)| a >= b);
    match (le, ge) {
        (true, false) => ComparisonResult::FirstPreferred,
        (false, true) => ComparisonResult::SecondPreferred,
        (true, true) => ComparisonResult::Indifferent,
        (false, false) => ComparisonResult::Uncomparable,
    }
}

pub fn vector(ids: &[String], vals: &[f64]) -> OutcomeVector {
    ids.iter().cloned().zip(vals.iter().copied()).collect()
}

pub fn load_fixture(name: &str) -> PosetalGame {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    PosetalGame::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn metric_map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}
