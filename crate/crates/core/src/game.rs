//! Finite games with posetal preferences and their JSON exchange format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preference::{OutcomeVector, Preference, PreferenceError, PreferenceLiteral};

/// Separator between action labels in profile keys.
pub const PROFILE_SEPARATOR: char = '/';

#[derive(Debug, Error)]
pub enum GameError {
    #[error("malformed game file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("preference of player `{player}`: {source}")]
    Preference { player: String, source: PreferenceError },
    #[error("game has no players")]
    NoPlayers,
    #[error("duplicate player `{0}`")]
    DuplicatePlayer(String),
    #[error("duplicate metric `{0}`")]
    DuplicateMetric(String),
    #[error("player `{0}` has no actions")]
    EmptyActions(String),
    #[error("player `{player}` declares action `{action}` twice")]
    DuplicateAction { player: String, action: String },
    #[error("action label `{0}` must be nonempty and must not contain '/'")]
    BadActionLabel(String),
    #[error("profile key `{0}` does not name a joint action")]
    UnknownProfile(String),
    #[error("profile `{profile}` lists unknown player `{player}`")]
    UnknownPlayerInOutcome { profile: String, player: String },
    #[error("player `{0}` not found")]
    PlayerNotFound(String),
    #[error("profile {0:?} is out of range")]
    ProfileNotFound(Vec<usize>),
    #[error("game has {profiles} joint profiles, above the cap of {cap}")]
    TooLarge { profiles: u128, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Depends only on the owner's own action.
    Personal,
    /// May depend on several players' actions.
    Joint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDecl {
    pub id: String,
    pub scope: Scope,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Least value of the metric's outcome set, when it is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
}

impl MetricDecl {
    pub fn personal(id: &str) -> Self {
        MetricDecl { id: id.into(), scope: Scope::Personal, description: String::new(), lower_bound: None }
    }

    pub fn joint(id: &str) -> Self {
        MetricDecl { id: id.into(), scope: Scope::Joint, description: String::new(), lower_bound: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub id: String,
    pub actions: Vec<String>,
    pub preference: Preference,
}

impl Player {
    pub fn new(id: &str, actions: &[&str], preference: Preference) -> Self {
        Player { id: id.into(), actions: actions.iter().map(|s| s.to_string()).collect(), preference }
    }
}

/// A joint action profile: one action index per player, in player order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Profile(pub Vec<usize>);

/// Problems `validate_game` can report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingOutcome { profile: String, player: String },
    UnknownMetric { player: String, metric: String },
    MissingMetricValue { profile: String, player: String, metric: String },
    NonFinite { profile: String, player: String, metric: String },
    BelowLowerBound { profile: String, player: String, metric: String, value: f64 },
    /// A personal metric changed for its player when only other players moved.
    ScopeViolation { metric: String, player: String, profile: String, other: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingOutcome { profile, player } => {
                write!(f, "no outcome for player {player} at profile {profile}")
            }
            Violation::UnknownMetric { player, metric } => {
                write!(f, "player {player} ranks undeclared metric {metric}")
            }
            Violation::MissingMetricValue { profile, player, metric } => {
                write!(f, "outcome of {player} at {profile} lacks metric {metric}")
            }
            Violation::NonFinite { profile, player, metric } => {
                write!(f, "value of {metric} for {player} at {profile} is not finite")
            }
            Violation::BelowLowerBound { profile, player, metric, value } => {
                write!(f, "value {value} of {metric} for {player} at {profile} is below its lower bound")
            }
            Violation::ScopeViolation { metric, player, profile, other } => write!(
                f,
                "personal metric {metric} of {player} differs between {profile} and {other}, \
                 which differ only in other players' actions"
            ),
        }
    }
}

/// A finite game whose players rank outcomes with posetal preferences.
///
/// The outcome table is dense: `table[profile_index][player]`. Profile
/// indices are mixed-radix numbers with the first player most significant,
/// which is also the canonical enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct PosetalGame {
    metrics: Vec<MetricDecl>,
    players: Vec<Player>,
    nonnegative: bool,
    strides: Vec<usize>,
    table: Vec<Vec<Option<OutcomeVector>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    metrics: Vec<MetricDecl>,
    players: Vec<PlayerFile>,
    outcomes: BTreeMap<String, BTreeMap<String, OutcomeVector>>,
    #[serde(default = "default_true")]
    nonnegative: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayerFile {
    id: String,
    actions: Vec<String>,
    preference: PreferenceLiteral,
}

fn default_true() -> bool {
    true
}

impl PosetalGame {
    /// A game with an empty outcome table, refusing anything above `cap`
    /// joint profiles.
    pub fn with_cap(
        metrics: Vec<MetricDecl>,
        players: Vec<Player>,
        nonnegative: bool,
        cap: usize,
    ) -> Result<Self, GameError> {
        if players.is_empty() {
            return Err(GameError::NoPlayers);
        }
        let mut seen = BTreeSet::new();
        for m in &metrics {
            if !seen.insert(m.id.as_str()) {
                return Err(GameError::DuplicateMetric(m.id.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut count: u128 = 1;
        for p in &players {
            if !seen.insert(p.id.as_str()) {
                return Err(GameError::DuplicatePlayer(p.id.clone()));
            }
            if p.actions.is_empty() {
                return Err(GameError::EmptyActions(p.id.clone()));
            }
            let mut acts = BTreeSet::new();
            for a in &p.actions {
                if a.is_empty() || a.contains(PROFILE_SEPARATOR) {
                    return Err(GameError::BadActionLabel(a.clone()));
                }
                if !acts.insert(a.as_str()) {
                    return Err(GameError::DuplicateAction { player: p.id.clone(), action: a.clone() });
                }
            }
            count = count.saturating_mul(p.actions.len() as u128);
        }
        if count > cap as u128 {
            return Err(GameError::TooLarge { profiles: count, cap });
        }
        let mut strides = vec![1usize; players.len()];
        for i in (0..players.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * players[i + 1].actions.len();
        }
        let table = vec![vec![None; players.len()]; count as usize];
        Ok(PosetalGame { metrics, players, nonnegative, strides, table })
    }

    /// Row-major outcome table: `table[profile index][player]`.
    pub(crate) fn table_mut(&mut self) -> &mut Vec<Vec<Option<OutcomeVector>>> {
        &mut self.table
    }

    pub fn new(metrics: Vec<MetricDecl>, players: Vec<Player>, nonnegative: bool) -> Result<Self, GameError> {
        Self::with_cap(metrics, players, nonnegative, usize::MAX)
    }

    /// Builds a game and fills its table from `f(profile, player)`.
    pub fn from_fn<F>(
        metrics: Vec<MetricDecl>,
        players: Vec<Player>,
        nonnegative: bool,
        mut f: F,
    ) -> Result<Self, GameError>
    where
        F: FnMut(&[usize], usize) -> OutcomeVector,
    {
        let mut g = Self::new(metrics, players, nonnegative)?;
        for idx in 0..g.num_profiles() {
            let prof = g.profile_at(idx);
            for i in 0..g.players.len() {
                g.table[idx][i] = Some(f(&prof, i));
            }
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, GameError> {
        Self::from_json_capped(text, usize::MAX)
    }

    pub fn from_json_capped(text: &str, cap: usize) -> Result<Self, GameError> {
        let file: GameFile = serde_json::from_str(text)?;
        let players = file
            .players
            .into_iter()
            .map(|p| {
                let preference = Preference::from_literal(&p.preference)
                    .map_err(|source| GameError::Preference { player: p.id.clone(), source })?;
                Ok(Player { id: p.id, actions: p.actions, preference })
            })
            .collect::<Result<Vec<_>, GameError>>()?;
        let mut g = Self::with_cap(file.metrics, players, file.nonnegative, cap)?;
        for (key, row) in file.outcomes {
            let prof = g.parse_profile_key(&key).ok_or_else(|| GameError::UnknownProfile(key.clone()))?;
            let idx = g.profile_index(&prof);
            for (pid, vec) in row {
                let i = g.player_index(&pid).map_err(|_| GameError::UnknownPlayerInOutcome {
                    profile: key.clone(),
                    player: pid.clone(),
                })?;
                g.table[idx][i] = Some(vec);
            }
        }
        Ok(g)
    }

    /// Canonical pretty-printed JSON. Parsing and re-serializing the output
    /// reproduces it byte for byte.
    pub fn to_json(&self) -> String {
        let mut outcomes = BTreeMap::new();
        for idx in 0..self.num_profiles() {
            let row: BTreeMap<String, OutcomeVector> = self.table[idx]
                .iter()
                .zip(&self.players)
                .filter_map(|(o, p)| o.clone().map(|o| (p.id.clone(), o)))
                .collect();
            if !row.is_empty() {
                outcomes.insert(self.profile_key(&self.profile_at(idx)), row);
            }
        }
        let file = GameFile {
            metrics: self.metrics.clone(),
            players: self
                .players
                .iter()
                .map(|p| PlayerFile {
                    id: p.id.clone(),
                    actions: p.actions.clone(),
                    preference: p.preference.to_literal(),
                })
                .collect(),
            outcomes,
            nonnegative: self.nonnegative,
        };
        let mut s = serde_json::to_string_pretty(&file).expect("game serializes");
        s.push('\n');
        s
    }

    pub fn metrics(&self) -> &[MetricDecl] {
        &self.metrics
    }

    pub fn metric(&self, id: &str) -> Option<&MetricDecl> {
        self.metrics.iter().find(|m| m.id == id)
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn player_index(&self, id: &str) -> Result<usize, GameError> {
        self.players.iter().position(|p| p.id == id).ok_or_else(|| GameError::PlayerNotFound(id.into()))
    }

    pub fn num_profiles(&self) -> usize {
        self.table.len()
    }

    /// Number of actions of each player.
    pub fn radices(&self) -> Vec<usize> {
        self.players.iter().map(|p| p.actions.len()).collect()
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn profile_at(&self, mut idx: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let a = idx / s;
                idx %= s;
                a
            })
            .collect()
    }

    /// Action of `player` in the profile with index `idx`.
    pub fn action_at(&self, idx: usize, player: usize) -> usize {
        (idx / self.strides[player]) % self.players[player].actions.len()
    }

    /// Index of the profile where `player` switches to `action`.
    pub fn deviate(&self, idx: usize, player: usize, action: usize) -> usize {
        let s = self.strides[player];
        idx - self.action_at(idx, player) * s + action * s
    }

    pub fn profile_key(&self, profile: &[usize]) -> String {
        profile
            .iter()
            .zip(&self.players)
            .map(|(&a, p)| p.actions[a].as_str())
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn parse_profile_key(&self, key: &str) -> Option<Vec<usize>> {
        let parts: Vec<&str> = key.split(PROFILE_SEPARATOR).collect();
        if parts.len() != self.players.len() {
            return None;
        }
        parts
            .iter()
            .zip(&self.players)
            .map(|(a, p)| p.actions.iter().position(|x| x == a))
            .collect()
    }

    pub fn check_profile(&self, profile: &[usize]) -> Result<(), GameError> {
        let ok = profile.len() == self.players.len()
            && profile.iter().zip(&self.players).all(|(&a, p)| a < p.actions.len());
        if ok {
            Ok(())
        } else {
            Err(GameError::ProfileNotFound(profile.to_vec()))
        }
    }

    /// Table entry, if present.
    pub fn outcome_at(&self, idx: usize, player: usize) -> Option<&OutcomeVector> {
        self.table.get(idx)?.get(player)?.as_ref()
    }

    pub fn set_outcome(&mut self, profile: &[usize], player: usize, outcome: OutcomeVector) -> Result<(), GameError> {
        self.check_profile(profile)?;
        if player >= self.players.len() {
            return Err(GameError::PlayerNotFound(player.to_string()));
        }
        let idx = self.profile_index(profile);
        self.table[idx][player] = Some(outcome);
        Ok(())
    }

    pub fn remove_outcome(&mut self, profile: &[usize], player: usize) -> Result<Option<OutcomeVector>, GameError> {
        self.check_profile(profile)?;
        let idx = self.profile_index(profile);
        Ok(self.table[idx].get_mut(player).and_then(Option::take))
    }

    /// Same game with every player's preference replaced.
    pub fn with_preferences(&self, prefs: Vec<Preference>) -> Result<Self, GameError> {
        if prefs.len() != self.players.len() {
            return Err(GameError::PlayerNotFound(format!("expected {} preferences", self.players.len())));
        }
        let mut g = self.clone();
        for (p, pref) in g.players.iter_mut().zip(prefs) {
            p.preference = pref;
        }
        Ok(g)
    }

    /// Players whose preference mentions the raw metric `id` (the metric's
    /// feature set).
    pub fn featuring_players(&self, id: &str) -> Vec<usize> {
        (0..self.players.len())
            .filter(|&i| {
                self.players[i].preference.leaves().map(|l| l.contains(id)).unwrap_or(false)
            })
            .collect()
    }
}

/// Looks up one player's outcome at a profile.
pub fn outcome<'g>(g: &'g PosetalGame, profile: &[usize], player: &str) -> Result<&'g OutcomeVector, GameError> {
    g.check_profile(profile)?;
    let i = g.player_index(player)?;
    g.outcome_at(g.profile_index(profile), i)
        .ok_or_else(|| GameError::ProfileNotFound(profile.to_vec()))
}

/// Every joint profile, first player's action most significant.
pub fn joint_profiles(g: &PosetalGame) -> Vec<Profile> {
    (0..g.num_profiles()).map(|i| Profile(g.profile_at(i))).collect()
}

/// Reports everything that keeps the table from being a well-formed game.
pub fn validate_game(g: &PosetalGame) -> Vec<Violation> {
    let mut out = Vec::new();
    let declared: BTreeMap<&str, &MetricDecl> = g.metrics.iter().map(|m| (m.id.as_str(), m)).collect();
    let mut leaves: Vec<Vec<String>> = Vec::new();
    for p in &g.players {
        match p.preference.leaves() {
            Ok(ls) => {
                for m in &ls {
                    if !declared.contains_key(m.as_str()) {
                        out.push(Violation::UnknownMetric { player: p.id.clone(), metric: m.clone() });
                    }
                }
                leaves.push(ls.into_iter().collect());
            }
            Err(_) => leaves.push(Vec::new()),
        }
    }

    for idx in 0..g.num_profiles() {
        let key = || g.profile_key(&g.profile_at(idx));
        for (i, p) in g.players.iter().enumerate() {
            let Some(o) = g.outcome_at(idx, i) else {
                out.push(Violation::MissingOutcome { profile: key(), player: p.id.clone() });
                continue;
            };
            for m in &leaves[i] {
                if o.get(m).is_none() {
                    out.push(Violation::MissingMetricValue {
                        profile: key(),
                        player: p.id.clone(),
                        metric: m.clone(),
                    });
                }
            }
            for (m, &v) in o.iter() {
                if !v.is_finite() {
                    out.push(Violation::NonFinite { profile: key(), player: p.id.clone(), metric: m.clone() });
                    continue;
                }
                let bound = declared
                    .get(m.as_str())
                    .and_then(|d| d.lower_bound)
                    .or(if g.nonnegative { Some(0.0) } else { None });
                if let Some(b) = bound {
                    if v < b {
                        out.push(Violation::BelowLowerBound {
                            profile: key(),
                            player: p.id.clone(),
                            metric: m.clone(),
                            value: v,
                        });
                    }
                }
            }
        }
    }

    // Personal metrics: a player's value may only depend on that player's
    // own action. Compare each profile with the one where every other
    // player plays action 0.
    for (i, p) in g.players.iter().enumerate() {
        for m in &leaves[i] {
            if declared.get(m.as_str()).map(|d| d.scope) != Some(Scope::Personal) {
                continue;
            }
            for idx in 0..g.num_profiles() {
                let base = g.profile_index(
                    &(0..g.num_players())
                        .map(|j| if j == i { g.action_at(idx, i) } else { 0 })
                        .collect::<Vec<_>>(),
                );
                if base == idx {
                    continue;
                }
                let a = g.outcome_at(idx, i).and_then(|o| o.get(m));
                let b = g.outcome_at(base, i).and_then(|o| o.get(m));
                if let (Some(a), Some(b)) = (a, b) {
                    if a != b && !(a.is_nan() && b.is_nan()) {
                        out.push(Violation::ScopeViolation {
                            metric: m.clone(),
                            player: p.id.clone(),
                            profile: g.profile_key(&g.profile_at(idx)),
                            other: g.profile_key(&g.profile_at(base)),
                        });
                    }
                }
            }
        }
    }
    out
}
