//! Best responses, pure Nash equilibria, action ranks and the empirical
//! checks relating them.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{GameError, PosetalGame, Profile};
use crate::preference::{CompiledPreference, ComparisonResult, PreferenceError};

/// Tolerance for "metric is at its minimum" in rank computations.
pub const RANK_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("player `{player}`: {source}")]
    Preference { player: String, source: PreferenceError },
    #[error("incomparable games: {0}")]
    IncomparableGames(String),
}

/// A game with every player's preference compiled and every node value
/// precomputed, ready for repeated comparisons.
#[derive(Debug, Clone)]
pub struct EvaluatedGame<'g> {
    game: &'g PosetalGame,
    prefs: Vec<CompiledPreference>,
    /// `values[player][profile]`: node values in the compiled node order.
    values: Vec<Vec<Vec<f64>>>,
}

impl<'g> EvaluatedGame<'g> {
    pub fn new(game: &'g PosetalGame) -> Result<Self, SolverError> {
        let mut prefs = Vec::with_capacity(game.num_players());
        let mut values = Vec::with_capacity(game.num_players());
        for (i, p) in game.players().iter().enumerate() {
            let err = |source| SolverError::Preference { player: p.id.clone(), source };
            let cp = p.preference.compile().map_err(err)?;
            let vals = (0..game.num_profiles())
                .into_par_iter()
                .map(|idx| {
                    let o = game.outcome_at(idx, i).ok_or_else(|| {
                        SolverError::Game(GameError::ProfileNotFound(game.profile_at(idx)))
                    })?;
                    cp.values(o).map_err(err)
                })
                .collect::<Result<Vec<_>, _>>()?;
            prefs.push(cp);
            values.push(vals);
        }
        Ok(EvaluatedGame { game, prefs, values })
    }

    pub fn game(&self) -> &'g PosetalGame {
        self.game
    }

    pub fn preference(&self, player: usize) -> &CompiledPreference {
        &self.prefs[player]
    }

    pub fn values(&self, player: usize, profile: usize) -> &[f64] {
        &self.values[player][profile]
    }

    /// Compares player `i`'s outcomes at two profile indices.
    pub fn compare(&self, i: usize, a: usize, b: usize) -> ComparisonResult {
        self.prefs[i].compare_values(&self.values[i][a], &self.values[i][b])
    }

    fn alternatives(&self, i: usize, idx: usize) -> Vec<usize> {
        (0..self.game.players()[i].actions.len()).map(|a| self.game.deviate(idx, i, a)).collect()
    }

    /// Weak best responses of player `i` against the other players' actions
    /// in profile `idx` (player `i`'s own action in `idx` is ignored).
    pub fn weak_best_responses(&self, i: usize, idx: usize) -> Vec<usize> {
        let alts = self.alternatives(i, idx);
        (0..alts.len())
            .filter(|&a| {
                !alts.iter().any(|&b| self.compare(i, b, alts[a]) == ComparisonResult::FirstPreferred)
            })
            .collect()
    }

    /// Strict best responses: actions strictly preferred to every other
    /// action. Empty or a singleton.
    pub fn strict_best_responses(&self, i: usize, idx: usize) -> Vec<usize> {
        let alts = self.alternatives(i, idx);
        (0..alts.len())
            .filter(|&a| {
                (0..alts.len())
                    .filter(|&b| b != a)
                    .all(|b| self.compare(i, alts[a], alts[b]) == ComparisonResult::FirstPreferred)
            })
            .collect()
    }

    /// Per-profile flags: is player `i`'s action a weak / strict best response.
    fn best_response_flags(&self, i: usize) -> (Vec<bool>, Vec<bool>) {
        let n = self.game.num_profiles();
        let stride = self.game.stride(i);
        let k = self.game.players()[i].actions.len();
        // one class per assignment of the other players' actions
        let bases: Vec<usize> = (0..n).filter(|&idx| self.game.action_at(idx, i) == 0).collect();
        let per_class: Vec<(Vec<bool>, Vec<bool>)> = bases
            .par_iter()
            .map(|&base| {
                let mut weak = vec![true; k];
                let mut strict = vec![true; k];
                for a in 0..k {
                    for b in 0..k {
                        if a == b {
                            continue;
                        }
                        let r = self.compare(i, base + a * stride, base + b * stride);
                        if r != ComparisonResult::FirstPreferred {
                            strict[a] = false;
                        }
                        if r == ComparisonResult::SecondPreferred {
                            weak[a] = false;
                        }
                    }
                }
                (weak, strict)
            })
            .collect();
        let mut weak = vec![false; n];
        let mut strict = vec![false; n];
        for (base, (w, s)) in bases.iter().zip(per_class) {
            for a in 0..k {
                weak[base + a * stride] = w[a];
                strict[base + a * stride] = s[a];
            }
        }
        (weak, strict)
    }

    /// `a` product-dominates `b`: no player worse off, at least one strictly
    /// better off.
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        let mut strict = false;
        for i in 0..self.game.num_players() {
            match self.compare(i, a, b) {
                ComparisonResult::FirstPreferred => strict = true,
                ComparisonResult::Indifferent => {}
                _ => return false,
            }
        }
        strict
    }

    pub fn equilibria(&self) -> EquilibriumSet {
        let n = self.game.num_profiles();
        let mut weak = vec![true; n];
        let mut strict = vec![true; n];
        for i in 0..self.game.num_players() {
            let (w, s) = self.best_response_flags(i);
            for idx in 0..n {
                weak[idx] &= w[idx];
                strict[idx] &= s[idx];
            }
        }
        let weak: Vec<usize> = (0..n).filter(|&i| weak[i]).collect();
        let strict: Vec<usize> = (0..n).filter(|&i| strict[i]).collect();
        let admissible: Vec<usize> = weak
            .par_iter()
            .copied()
            .filter(|&g| !weak.iter().any(|&h| h != g && self.dominates(h, g)))
            .collect();
        EquilibriumSet { weak, strict, admissible }
    }

    /// Reference minimum of every node of every player's preference.
    pub fn reference_minima(&self, reference: RankReference) -> Vec<Vec<f64>> {
        (0..self.game.num_players())
            .map(|i| match reference {
                RankReference::Declared => {
                    let cp = &self.prefs[i];
                    let raw: Vec<f64> =
                        cp.leaves().iter().map(|m| declared_minimum(self.game, m)).collect();
                    cp.values_from_leaves(&raw)
                }
                RankReference::Achievable => {
                    let mut mins = vec![f64::INFINITY; self.prefs[i].nodes().len()];
                    for v in &self.values[i] {
                        for (m, x) in mins.iter_mut().zip(v) {
                            *m = m.min(*x);
                        }
                    }
                    mins
                }
            })
            .collect()
    }

    /// Rank of player `i`'s action at profile `idx`, given precomputed
    /// reference minima.
    pub fn rank_with(&self, i: usize, idx: usize, minima: &[Vec<f64>]) -> usize {
        let cp = &self.prefs[i];
        let vals = &self.values[i][idx];
        let mut at_min = 0u64;
        for (m, (v, lo)) in vals.iter().zip(&minima[i]).enumerate() {
            if lo.is_finite() && *v <= lo + RANK_EPSILON {
                at_min |= 1 << m;
            }
        }
        let critical = (0..vals.len())
            .filter(|&m| at_min & (1 << m) == 0 && cp.above_mask(m) & !at_min == 0)
            .map(|m| cp.rank(m))
            .min();
        critical.unwrap_or(cp.height())
    }

    pub fn rank_of_action(&self, i: usize, idx: usize, reference: RankReference) -> usize {
        self.rank_with(i, idx, &self.reference_minima(reference))
    }

    pub fn common_rank_with(&self, idx: usize, minima: &[Vec<f64>]) -> RankReport {
        let per_player: Vec<usize> =
            (0..self.game.num_players()).map(|i| self.rank_with(i, idx, minima)).collect();
        let common = per_player.iter().copied().min().unwrap_or(0);
        RankReport { per_player, common }
    }
}

/// Least value of a metric's declared outcome set.
fn declared_minimum(g: &PosetalGame, metric: &str) -> f64 {
    match g.metric(metric).and_then(|m| m.lower_bound) {
        Some(b) => b,
        None if g.nonnegative() => 0.0,
        None => f64::NEG_INFINITY,
    }
}

/// Where "a metric is minimized" is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankReference {
    /// The least value of the declared outcome set: the metric's
    /// `lower_bound`, else 0 in a nonnegative game, else unbounded.
    #[default]
    Declared,
    /// The least value the metric attains anywhere in the table.
    Achievable,
}

/// Profile indices (canonical order) of the three kinds of equilibria.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct EquilibriumSet {
    pub weak: Vec<usize>,
    pub strict: Vec<usize>,
    pub admissible: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub per_player: Vec<usize>,
    pub common: usize,
}

fn player_index(g: &PosetalGame, i: usize) -> Result<(), SolverError> {
    if i < g.num_players() {
        Ok(())
    } else {
        Err(GameError::PlayerNotFound(i.to_string()).into())
    }
}

/// Weak best responses of player `i` against `profile` (its own entry is
/// ignored).
pub fn weak_best_responses(g: &PosetalGame, i: usize, profile: &[usize]) -> Result<Vec<usize>, SolverError> {
    player_index(g, i)?;
    g.check_profile(profile)?;
    Ok(EvaluatedGame::new(g)?.weak_best_responses(i, g.profile_index(profile)))
}

pub fn strict_best_responses(g: &PosetalGame, i: usize, profile: &[usize]) -> Result<Vec<usize>, SolverError> {
    player_index(g, i)?;
    g.check_profile(profile)?;
    Ok(EvaluatedGame::new(g)?.strict_best_responses(i, g.profile_index(profile)))
}

pub fn enumerate_equilibria(g: &PosetalGame) -> Result<EquilibriumSet, SolverError> {
    Ok(EvaluatedGame::new(g)?.equilibria())
}

pub fn rank_of_action(
    g: &PosetalGame,
    i: usize,
    profile: &[usize],
    reference: RankReference,
) -> Result<usize, SolverError> {
    player_index(g, i)?;
    g.check_profile(profile)?;
    Ok(EvaluatedGame::new(g)?.rank_of_action(i, g.profile_index(profile), reference))
}

pub fn common_rank(g: &PosetalGame, profile: &[usize], reference: RankReference) -> Result<RankReport, SolverError> {
    g.check_profile(profile)?;
    let ev = EvaluatedGame::new(g)?;
    Ok(ev.common_rank_with(g.profile_index(profile), &ev.reference_minima(reference)))
}

/// Which equilibrium pairs the rank-dominance check compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankDominanceMode {
    /// Every non-admissible weak NE against every admissible one.
    AllPairs,
    /// Only pairs where the admissible NE product-dominates the other.
    DominatingPairs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankViolation {
    /// The non-admissible equilibrium.
    pub dominated: Profile,
    pub admissible: Profile,
    pub player: usize,
    pub rank_dominated: usize,
    pub rank_admissible: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RankDominance {
    Holds { pairs_checked: usize },
    Violation(RankViolation),
}

impl RankDominance {
    pub fn holds(&self) -> bool {
        matches!(self, RankDominance::Holds { .. })
    }
}

/// Checks that no non-admissible weak NE gives any player a higher rank
/// than an admissible one. Reports the first violation in canonical order.
pub fn check_admissible_rank_dominance(
    ev: &EvaluatedGame<'_>,
    eq: &EquilibriumSet,
    reference: RankReference,
    mode: RankDominanceMode,
) -> RankDominance {
    let g = ev.game();
    let minima = ev.reference_minima(reference);
    let non_admissible: Vec<usize> =
        eq.weak.iter().copied().filter(|w| eq.admissible.binary_search(w).is_err()).collect();
    let mut pairs = 0;
    for &d in &non_admissible {
        let rd = ev.common_rank_with(d, &minima).per_player;
        for &a in &eq.admissible {
            if mode == RankDominanceMode::DominatingPairs && !ev.dominates(a, d) {
                continue;
            }
            pairs += 1;
            let ra = ev.common_rank_with(a, &minima).per_player;
            if let Some(i) = (0..g.num_players()).find(|&i| rd[i] > ra[i]) {
                return RankDominance::Violation(RankViolation {
                    dominated: Profile(g.profile_at(d)),
                    admissible: Profile(g.profile_at(a)),
                    player: i,
                    rank_dominated: rd[i],
                    rank_admissible: ra[i],
                });
            }
        }
    }
    RankDominance::Holds { pairs_checked: pairs }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RefinementCheck {
    Holds { weak_before: usize, weak_after: usize },
    /// Weak NE of the refined game that are not weak NE of the original.
    Violation { profiles: Vec<Profile> },
}

impl RefinementCheck {
    pub fn holds(&self) -> bool {
        matches!(self, RefinementCheck::Holds { .. })
    }
}

/// Checks that two games differ at most in preferences.
pub fn ensure_same_structure(a: &PosetalGame, b: &PosetalGame) -> Result<(), SolverError> {
    let diff = |what: &str| Err(SolverError::IncomparableGames(format!("{what} differ")));
    if a.num_players() != b.num_players() {
        return diff("player counts");
    }
    for (p, q) in a.players().iter().zip(b.players()) {
        if p.id != q.id || p.actions != q.actions {
            return diff("players or action sets");
        }
    }
    if a.metrics() != b.metrics() || a.nonnegative() != b.nonnegative() {
        return diff("metric declarations");
    }
    for idx in 0..a.num_profiles() {
        for i in 0..a.num_players() {
            if a.outcome_at(idx, i) != b.outcome_at(idx, i) {
                return diff("outcome tables");
            }
        }
    }
    Ok(())
}

/// Checks that refining preferences only removes weak equilibria.
pub fn check_refinement_theorem(before: &PosetalGame, after: &PosetalGame) -> Result<RefinementCheck, SolverError> {
    ensure_same_structure(before, after)?;
    let wb = enumerate_equilibria(before)?.weak;
    let wa = enumerate_equilibria(after)?.weak;
    let extra: Vec<Profile> =
        wa.iter().filter(|x| wb.binary_search(x).is_err()).map(|&x| Profile(after.profile_at(x))).collect();
    Ok(if extra.is_empty() {
        RefinementCheck::Holds { weak_before: wb.len(), weak_after: wa.len() }
    } else {
        RefinementCheck::Violation { profiles: extra }
    })
}
