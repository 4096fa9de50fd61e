//! Sufficient conditions for pure equilibria and the posetal potential
//! built from them.
//!
//! Personal metrics are tagged with their owner (`time@P1`) when players'
//! preferences are merged, so each player's personal metrics stay disjoint
//! from everyone else's. Joint metrics keep their id and are shared.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{PosetalGame, Profile, Scope};
use crate::order::{find_cycle, Poset};
use crate::preference::{CompiledPreference, ComparisonResult, Preference};
use crate::solver::{EvaluatedGame, SolverError};

#[derive(Debug, Error)]
pub enum ExistenceError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("metric `{0}` not found in any preference")]
    MetricNotFound(String),
    #[error("the existence conditions do not hold")]
    ConditionsNotMet(Box<ExistenceReport>),
    #[error("the union of the preferences has a cycle: {}", .0.join(" < "))]
    NotAPoset(Vec<String>),
    #[error("no aggregation weight may be nonpositive (node `{0}`)")]
    BadWeight(String),
}

/// Which profile pairs the jointly-communal test ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommunalMode {
    /// Pairs differing in one player's action.
    #[default]
    Unilateral,
    /// Every pair of profiles.
    AllPairs,
}

/// One node of the merged preference and the player-level nodes behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionNode {
    pub id: String,
    pub joint: bool,
    /// `(player, node id in that player's preference)`.
    pub holders: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionPreference {
    pub nodes: Vec<UnionNode>,
    /// `(lower, higher)` pairs contributed by the players' Hasse diagrams.
    pub edges: Vec<(String, String)>,
    pub is_poset: bool,
    pub cycle_witness: Option<Vec<String>>,
}

impl UnionPreference {
    pub fn node(&self, id: &str) -> Option<&UnionNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn poset(&self) -> Option<Poset> {
        if !self.is_poset {
            return None;
        }
        Poset::new(self.nodes.iter().map(|n| n.id.clone()), self.edges.iter().cloned()).ok()
    }

    /// Reachability in the merged relation, reflexive. Works for cyclic
    /// unions too.
    fn reach(&self) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let pos: BTreeMap<&str, usize> =
            self.nodes.iter().enumerate().map(|(i, u)| (u.id.as_str(), i)).collect();
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for (lo, hi) in &self.edges {
            r[pos[lo.as_str()]][pos[hi.as_str()]] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        r
    }
}

fn is_joint_node(g: &PosetalGame, pref: &Preference, node: &str) -> bool {
    pref.leaves_of(node)
        .map(|ls| ls.iter().any(|m| g.metric(m).map(|d| d.scope) != Some(Scope::Personal)))
        .unwrap_or(true)
}

fn union_id(g: &PosetalGame, player: usize, node: &str) -> String {
    let pref = &g.players()[player].preference;
    if is_joint_node(g, pref, node) {
        node.to_string()
    } else {
        format!("{node}@{}", g.players()[player].id)
    }
}

/// Merges every player's preference into one relation.
pub fn union_preferences(g: &PosetalGame) -> UnionPreference {
    let mut nodes: BTreeMap<String, UnionNode> = BTreeMap::new();
    let mut edges: BTreeSet<(String, String)> = BTreeSet::new();
    for (i, p) in g.players().iter().enumerate() {
        let pref = &p.preference;
        for n in pref.carrier() {
            let id = union_id(g, i, n);
            let joint = is_joint_node(g, pref, n);
            nodes
                .entry(id.clone())
                .or_insert_with(|| UnionNode { id, joint, holders: Vec::new() })
                .holders
                .push((i, n.clone()));
        }
        for (lo, hi) in pref.poset().hasse_edges() {
            edges.insert((union_id(g, i, &lo), union_id(g, i, &hi)));
        }
    }
    let ids: Vec<String> = nodes.keys().cloned().collect();
    let edges: Vec<(String, String)> = edges.into_iter().collect();
    let cycle_witness = find_cycle(&ids, &edges);
    UnionPreference {
        nodes: nodes.into_values().collect(),
        edges,
        is_poset: cycle_witness.is_none(),
        cycle_witness,
    }
}

/// Evidence that a pair of metrics is not jointly communal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunalWitness {
    /// Metric that improved.
    pub improved: String,
    /// Metric whose population sum got worse.
    pub worsened: String,
    pub player: String,
    pub from: Profile,
    pub to: Profile,
    pub improvement: f64,
    pub sum_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckOutcome<W> {
    Holds,
    Violation(W),
}

impl<W> CheckOutcome<W> {
    pub fn holds(&self) -> bool {
        matches!(self, CheckOutcome::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            CheckOutcome::Holds => None,
            CheckOutcome::Violation(w) => Some(w),
        }
    }
}

/// Value lookup shared by the condition checks and the potential.
struct Values<'a> {
    ev: EvaluatedGame<'a>,
}

impl<'a> Values<'a> {
    fn new(g: &'a PosetalGame) -> Result<Self, ExistenceError> {
        Ok(Values { ev: EvaluatedGame::new(g)? })
    }

    fn node_index(&self, player: usize, node: &str) -> usize {
        let cp: &CompiledPreference = self.ev.preference(player);
        cp.nodes().binary_search_by(|n| n.as_str().cmp(node)).expect("holder node is in the carrier")
    }

    fn get(&self, player: usize, slot: usize, profile: usize) -> f64 {
        self.ev.values(player, profile)[slot]
    }
}

type Holders = Vec<(usize, usize)>;

fn resolve(vals: &Values<'_>, node: &UnionNode) -> Holders {
    node.holders.iter().map(|(p, n)| (*p, vals.node_index(*p, n))).collect()
}

fn communal_pair(
    vals: &Values<'_>,
    k: (&UnionNode, &Holders),
    l: (&UnionNode, &Holders),
    mode: CommunalMode,
) -> Option<CommunalWitness> {
    let g = vals.ev.game();
    let n = g.num_profiles();
    let test = |from: usize, to: usize| -> Option<CommunalWitness> {
        for &(i, slot) in k.1 {
            let d = vals.get(i, slot, to) - vals.get(i, slot, from);
            if d < 0.0 {
                let sum: f64 = l.1.iter().map(|&(j, s)| vals.get(j, s, to) - vals.get(j, s, from)).sum();
                if sum > 0.0 {
                    return Some(CommunalWitness {
                        improved: k.0.id.clone(),
                        worsened: l.0.id.clone(),
                        player: g.players()[i].id.clone(),
                        from: Profile(g.profile_at(from)),
                        to: Profile(g.profile_at(to)),
                        improvement: -d,
                        sum_change: sum,
                    });
                }
            }
        }
        None
    };
    let scan = |from: usize| -> Option<CommunalWitness> {
        match mode {
            CommunalMode::Unilateral => (0..g.num_players()).find_map(|p| {
                (0..g.players()[p].actions.len()).find_map(|a| {
                    let to = g.deviate(from, p, a);
                    if to == from {
                        None
                    } else {
                        test(from, to)
                    }
                })
            }),
            CommunalMode::AllPairs => (0..n).find_map(|to| if to == from { None } else { test(from, to) }),
        }
    };
    (0..n).into_par_iter().find_map_first(scan)
}

/// Checks both directions of the jointly-communal property for two merged
/// nodes (ids as in [`union_preferences`]: joint metric ids, or
/// `metric@player` for personal metrics).
pub fn check_jointly_communal(
    g: &PosetalGame,
    k: &str,
    l: &str,
    mode: CommunalMode,
) -> Result<CheckOutcome<CommunalWitness>, ExistenceError> {
    let union = union_preferences(g);
    let find = |id: &str| union.node(id).cloned().ok_or_else(|| ExistenceError::MetricNotFound(id.into()));
    let (nk, nl) = (find(k)?, find(l)?);
    if !nk.joint && !nl.joint {
        return Ok(CheckOutcome::Holds);
    }
    let vals = Values::new(g)?;
    let (hk, hl) = (resolve(&vals, &nk), resolve(&vals, &nl));
    let w = communal_pair(&vals, (&nk, &hk), (&nl, &hl), mode)
        .or_else(|| communal_pair(&vals, (&nl, &hl), (&nk, &hk), mode));
    Ok(w.map_or(CheckOutcome::Holds, CheckOutcome::Violation))
}

fn condition1_with(
    vals: &Values<'_>,
    union: &UnionPreference,
    mode: CommunalMode,
) -> CheckOutcome<CommunalWitness> {
    let reach = union.reach();
    let holders: Vec<Holders> = union.nodes.iter().map(|n| resolve(vals, n)).collect();
    for a in 0..union.nodes.len() {
        for b in a + 1..union.nodes.len() {
            if reach[a][b] || reach[b][a] {
                continue;
            }
            let (na, nb) = (&union.nodes[a], &union.nodes[b]);
            // pairs of personal metrics are communal by construction
            if !na.joint && !nb.joint {
                continue;
            }
            let w = communal_pair(vals, (na, &holders[a]), (nb, &holders[b]), mode)
                .or_else(|| communal_pair(vals, (nb, &holders[b]), (na, &holders[a]), mode));
            if let Some(w) = w {
                return CheckOutcome::Violation(w);
            }
        }
    }
    CheckOutcome::Holds
}

/// Every uncomparable pair of the merged preference must be jointly
/// communal.
pub fn check_condition1(g: &PosetalGame, mode: CommunalMode) -> Result<CheckOutcome<CommunalWitness>, ExistenceError> {
    let vals = Values::new(g)?;
    Ok(condition1_with(&vals, &union_preferences(g), mode))
}

/// Two players ranking the same pair of joint metrics in opposite order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PriorityConflict {
    pub player: String,
    pub other: String,
    /// Lower-priority metric for `player`.
    pub lower: String,
    pub higher: String,
}

/// Joint metrics must not be prioritized in opposite orders by two players.
pub fn check_condition2(g: &PosetalGame) -> CheckOutcome<PriorityConflict> {
    let players = g.players();
    for (i, p) in players.iter().enumerate() {
        let poset = p.preference.poset();
        let joint: Vec<&String> =
            poset.nodes().iter().filter(|n| is_joint_node(g, &p.preference, n)).collect();
        for k in &joint {
            for l in &joint {
                if k == l || !poset.lt(k, l).unwrap_or(false) {
                    continue;
                }
                for (j, q) in players.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let qp = q.preference.poset();
                    if qp.contains(k) && qp.contains(l) && qp.lt(l, k).unwrap_or(false) {
                        return CheckOutcome::Violation(PriorityConflict {
                            player: p.id.clone(),
                            other: q.id.clone(),
                            lower: (*k).clone(),
                            higher: (*l).clone(),
                        });
                    }
                }
            }
        }
    }
    CheckOutcome::Holds
}

/// A poset-valued function over joint profiles.
#[derive(Debug, Clone)]
pub struct PosetalPotential {
    preference: Preference,
    compiled: CompiledPreference,
    /// Weight of each holder in each node's aggregated value, by node id.
    weights: BTreeMap<String, Vec<(usize, f64)>>,
    /// `values[profile]`: node values in [`PosetalPotential::nodes`] order.
    values: Vec<Vec<f64>>,
}

impl PosetalPotential {
    pub fn nodes(&self) -> &[String] {
        self.compiled.nodes()
    }

    pub fn preference(&self) -> &Preference {
        &self.preference
    }

    pub fn weights(&self) -> &BTreeMap<String, Vec<(usize, f64)>> {
        &self.weights
    }

    pub fn value(&self, profile: usize) -> &[f64] {
        &self.values[profile]
    }

    pub fn compare(&self, a: usize, b: usize) -> ComparisonResult {
        self.compiled.compare_values(&self.values[a], &self.values[b])
    }
}

/// Per-node, per-player aggregation weights (player id to coefficient).
/// Nodes or players left out get weight 1.
pub type PotentialWeights = BTreeMap<String, BTreeMap<String, f64>>;

/// Builds the potential after confirming both conditions.
pub fn build_potential(
    g: &PosetalGame,
    weights: &PotentialWeights,
    mode: CommunalMode,
) -> Result<PosetalPotential, ExistenceError> {
    let report = check_existence_conditions(g, mode)?;
    if !report.union_is_poset {
        return Err(ExistenceError::NotAPoset(report.union_cycle.clone().unwrap_or_default()));
    }
    if !report.condition1.holds() || !report.condition2.holds() {
        return Err(ExistenceError::ConditionsNotMet(Box::new(report)));
    }
    build_potential_unchecked(g, weights)
}

/// Builds the potential without checking the conditions. The merged
/// preference still has to be a poset.
pub fn build_potential_unchecked(
    g: &PosetalGame,
    weights: &PotentialWeights,
) -> Result<PosetalPotential, ExistenceError> {
    let union = union_preferences(g);
    let poset = union
        .poset()
        .ok_or_else(|| ExistenceError::NotAPoset(union.cycle_witness.clone().unwrap_or_default()))?;
    let vals = Values::new(g)?;
    let mut node_weights = BTreeMap::new();
    let mut slots: Vec<Vec<(usize, usize, f64)>> = Vec::new();
    for node in &union.nodes {
        let mut ws = Vec::new();
        let mut ss = Vec::new();
        for (p, n) in &node.holders {
            let w = weights
                .get(&node.id)
                .and_then(|m| m.get(&g.players()[*p].id))
                .copied()
                .unwrap_or(1.0);
            if !(w.is_finite() && w > 0.0) {
                return Err(ExistenceError::BadWeight(node.id.clone()));
            }
            ws.push((*p, w));
            ss.push((*p, vals.node_index(*p, n), w));
        }
        node_weights.insert(node.id.clone(), ws);
        slots.push(ss);
    }
    let preference = Preference::new(poset);
    let compiled = preference.compile().map_err(|source| {
        ExistenceError::Solver(SolverError::Preference { player: "potential".into(), source })
    })?;
    // union nodes and compiled nodes are both sorted by id
    debug_assert!(compiled.nodes().iter().zip(&union.nodes).all(|(a, b)| *a == b.id));
    let values = (0..g.num_profiles())
        .into_par_iter()
        .map(|idx| {
            slots.iter().map(|ss| ss.iter().map(|&(p, s, w)| w * vals.get(p, s, idx)).sum()).collect()
        })
        .collect();
    Ok(PosetalPotential { preference, compiled, weights: node_weights, values })
}

/// A strictly improving unilateral deviation that does not strictly
/// decrease the potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialWitness {
    pub player: String,
    pub from: Profile,
    pub to: Profile,
    pub potential_comparison: ComparisonResult,
}

/// Exhaustively checks every unilateral deviation.
pub fn verify_potential(
    g: &PosetalGame,
    pot: &PosetalPotential,
) -> Result<CheckOutcome<PotentialWitness>, ExistenceError> {
    let ev = EvaluatedGame::new(g)?;
    let w = (0..g.num_profiles()).into_par_iter().find_map_first(|from| {
        (0..g.num_players()).find_map(|i| {
            (0..g.players()[i].actions.len()).find_map(|a| {
                let to = g.deviate(from, i, a);
                if to == from || ev.compare(i, to, from) != ComparisonResult::FirstPreferred {
                    return None;
                }
                let r = pot.compare(to, from);
                (r != ComparisonResult::FirstPreferred).then(|| PotentialWitness {
                    player: g.players()[i].id.clone(),
                    from: Profile(g.profile_at(from)),
                    to: Profile(g.profile_at(to)),
                    potential_comparison: r,
                })
            })
        })
    });
    Ok(w.map_or(CheckOutcome::Holds, CheckOutcome::Violation))
}

/// Profiles whose potential value no other profile strictly improves on.
pub fn potential_minima(g: &PosetalGame, pot: &PosetalPotential) -> Vec<usize> {
    let n = g.num_profiles();
    (0..n)
        .into_par_iter()
        .filter(|&a| !(0..n).any(|b| b != a && pot.compare(b, a) == ComparisonResult::FirstPreferred))
        .collect()
}

/// Results of the condition checks, in the shape the CLI reports them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceReport {
    pub mode: CommunalMode,
    pub union_is_poset: bool,
    pub union_cycle: Option<Vec<String>>,
    pub condition1: CheckOutcome<CommunalWitness>,
    pub condition2: CheckOutcome<PriorityConflict>,
}

impl ExistenceReport {
    pub fn conditions_hold(&self) -> bool {
        self.union_is_poset && self.condition1.holds() && self.condition2.holds()
    }
}

pub fn check_existence_conditions(g: &PosetalGame, mode: CommunalMode) -> Result<ExistenceReport, ExistenceError> {
    let union = union_preferences(g);
    let vals = Values::new(g)?;
    Ok(ExistenceReport {
        mode,
        union_is_poset: union.is_poset,
        union_cycle: union.cycle_witness.clone(),
        condition1: condition1_with(&vals, &union, mode),
        condition2: check_condition2(g),
    })
}
