//! A small multi-vehicle intersection world exported as a posetal game.
//!
//! Each vehicle picks one of its generated trajectories; outcome vectors hold
//! the nine driving metrics, all costs.

pub mod geometry;
pub mod metrics;
pub mod presets;
pub mod scenario;
pub mod trajectory;

use rayon::prelude::*;
use thiserror::Error;

use crate::game::{GameError, MetricDecl, Player, PosetalGame};
use crate::preference::Preference;

use metrics::{interaction_metrics, outcome_vector, pair_interaction, personal_metrics, PairInteraction};
pub use presets::{preference_preset, PRESET_NAMES};
pub use scenario::Scenario;
pub use trajectory::{generate_trajectories, Trajectory};

/// Default bound on the number of joint profiles of a generated game.
pub const DEFAULT_PROFILE_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum DrivingError {
    #[error("no feasible goal-reaching trajectory for vehicle `{player}`")]
    NoFeasibleTrajectory { player: String },
    #[error("trajectory `{0}` is not sampled on the scenario's time grid")]
    SamplingMismatch(String),
    #[error("game would have {profiles} joint profiles; raise the cap to at least {profiles} (current cap {cap})")]
    TooLarge { profiles: u128, cap: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unknown preference preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Game(GameError),
}

impl From<GameError> for DrivingError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::TooLarge { profiles, cap } => DrivingError::TooLarge { profiles, cap },
            e => DrivingError::Game(e),
        }
    }
}

fn metric_decls() -> Vec<MetricDecl> {
    let describe = |id: &str| match id {
        presets::COLLISION_ENERGY => "kinetic energy lost in collisions, J",
        presets::AREA_VIOLATION => "footprint area outside the drivable area, m^2 s",
        presets::CLEARANCE => "shortfall of the minimum distance to other vehicles, m",
        presets::TIME => "time to reach the goal, s",
        presets::PROGRESS => "route length left at the end, m",
        presets::COMFORT_LONG => "integrated absolute longitudinal acceleration, m/s",
        presets::COMFORT_LAT => "integrated absolute lateral acceleration, m/s",
        presets::DEVIATION_LAT => "integrated lateral offset from the route, m s",
        _ => "integrated heading error against the route, rad s",
    };
    presets::METRICS
        .iter()
        .map(|&id| {
            let mut d = if presets::is_joint(id) { MetricDecl::joint(id) } else { MetricDecl::personal(id) };
            d.description = describe(id).to_string();
            d.lower_bound = Some(0.0);
            d
        })
        .collect()
}

/// Preferences named by the scenario; vehicles without an entry get `A`.
pub fn scenario_preferences(scenario: &Scenario) -> Result<Vec<Preference>, DrivingError> {
    scenario
        .vehicles
        .iter()
        .map(|v| preference_preset(scenario.presets.get(&v.id).map_or("A", String::as_str)))
        .collect()
}

/// Trajectory sets of all vehicles, generated in parallel.
pub fn generate_all(scenario: &Scenario) -> Result<Vec<Vec<Trajectory>>, DrivingError> {
    (0..scenario.vehicles.len()).into_par_iter().map(|i| generate_trajectories(scenario, i)).collect()
}

/// Full outcome table over all joint trajectory profiles.
pub fn build_driving_game(
    scenario: &Scenario,
    trajectories: &[Vec<Trajectory>],
    preferences: Vec<Preference>,
    cap: usize,
) -> Result<PosetalGame, DrivingError> {
    let n = scenario.vehicles.len();
    if trajectories.len() != n || preferences.len() != n {
        return Err(DrivingError::InvalidScenario(format!(
            "expected trajectory sets and preferences for {n} vehicles"
        )));
    }
    for (v, set) in scenario.vehicles.iter().zip(trajectories) {
        if set.is_empty() {
            return Err(DrivingError::NoFeasibleTrajectory { player: v.id.clone() });
        }
    }
    let players = scenario
        .vehicles
        .iter()
        .zip(trajectories)
        .zip(preferences)
        .map(|((v, set), preference)| Player {
            id: v.id.clone(),
            actions: set.iter().map(|t| t.label.clone()).collect(),
            preference,
        })
        .collect();
    let mut game = PosetalGame::with_cap(metric_decls(), players, true, cap)?;

    let personal: Vec<Vec<metrics::PersonalMetrics>> = trajectories
        .par_iter()
        .enumerate()
        .map(|(i, set)| set.iter().map(|t| personal_metrics(scenario, i, t)).collect())
        .collect();
    let mut pairs: Vec<Vec<Vec<PairInteraction>>> = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            pairs[i * n + j] = trajectories[i]
                .par_iter()
                .map(|a| trajectories[j].iter().map(|b| pair_interaction(scenario, (i, a), (j, b))).collect())
                .collect();
        }
    }

    let total = game.num_profiles();
    let rows: Vec<Vec<Option<crate::preference::OutcomeVector>>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let prof = game.profile_at(idx);
            let lengths: Vec<usize> = (0..n).map(|i| trajectories[i][prof[i]].states.len()).collect();
            let inter = interaction_metrics(scenario, &lengths, &|i, j| &pairs[i * n + j][prof[i]][prof[j]]);
            (0..n).map(|i| Some(outcome_vector(&personal[i][prof[i]], inter[i].0, inter[i].1))).collect()
        })
        .collect();
    *game.table_mut() = rows;
    Ok(game)
}

/// Generates trajectories and builds the game with the scenario's presets.
pub fn scenario_game(scenario: &Scenario, cap: usize) -> Result<(Vec<Vec<Trajectory>>, PosetalGame), DrivingError> {
    let trajectories = generate_all(scenario)?;
    let game = build_driving_game(scenario, &trajectories, scenario_preferences(scenario)?, cap)?;
    Ok((trajectories, game))
}
