//! Preference presets A to E over the nine driving metrics.
//!
//! B, C and E are produced from A and D by refinement operations, so each
//! preset in a chain refines its predecessor by construction.

use crate::preference::{Preference, RefinementOp};

use super::DrivingError;

pub const COLLISION_ENERGY: &str = "collision_energy";
pub const AREA_VIOLATION: &str = "area_violation";
pub const CLEARANCE: &str = "clearance";
pub const TIME: &str = "time";
pub const PROGRESS: &str = "progress";
pub const COMFORT_LONG: &str = "comfort_long";
pub const COMFORT_LAT: &str = "comfort_lat";
pub const DEVIATION_LAT: &str = "deviation_lat";
pub const DEVIATION_HEADING: &str = "deviation_heading";

pub const METRICS: [&str; 9] = [
    COLLISION_ENERGY,
    AREA_VIOLATION,
    CLEARANCE,
    TIME,
    PROGRESS,
    COMFORT_LONG,
    COMFORT_LAT,
    DEVIATION_LAT,
    DEVIATION_HEADING,
];

/// Metrics shared by all vehicles of a profile.
pub fn is_joint(metric: &str) -> bool {
    metric == COLLISION_ENERGY || metric == CLEARANCE
}

pub const PRESET_NAMES: [&str; 5] = ["A", "B", "C", "D", "E"];

fn layered(layers: &[&[&str]]) -> Preference {
    let mut edges = Vec::new();
    for w in layers.windows(2) {
        for &hi in w[0] {
            for &lo in w[1] {
                edges.push((lo, hi));
            }
        }
    }
    Preference::from_edges(&METRICS, &edges).expect("layers form a partial order")
}

fn base_a() -> Preference {
    layered(&[
        &[COLLISION_ENERGY],
        &[AREA_VIOLATION, CLEARANCE],
        &[TIME],
        &[PROGRESS, COMFORT_LONG, COMFORT_LAT, DEVIATION_LAT, DEVIATION_HEADING],
    ])
}

fn base_d() -> Preference {
    layered(&[
        &[COLLISION_ENERGY],
        &[AREA_VIOLATION],
        &[CLEARANCE, TIME, PROGRESS],
        &[COMFORT_LONG, COMFORT_LAT],
        &[DEVIATION_LAT, DEVIATION_HEADING],
    ])
}

fn prio(lower: &str, higher: &str) -> RefinementOp {
    RefinementOp::PriorityRefine { lower: lower.into(), higher: higher.into() }
}

fn agg(left: &str, right: &str) -> RefinementOp {
    RefinementOp::Aggregate { left: left.into(), right: right.into(), weights: [1.0, 1.0] }
}

/// Operations turning A into B.
pub fn ops_a_to_b() -> Vec<RefinementOp> {
    vec![
        prio(COMFORT_LONG, PROGRESS),
        prio(COMFORT_LAT, PROGRESS),
        prio(DEVIATION_LAT, COMFORT_LONG),
        prio(DEVIATION_LAT, COMFORT_LAT),
        prio(DEVIATION_HEADING, COMFORT_LONG),
        prio(DEVIATION_HEADING, COMFORT_LAT),
    ]
}

/// Operations turning B into C.
pub fn ops_b_to_c() -> Vec<RefinementOp> {
    vec![agg(AREA_VIOLATION, CLEARANCE), agg(COMFORT_LAT, COMFORT_LONG)]
}

/// Operations turning D into E.
pub fn ops_d_to_e() -> Vec<RefinementOp> {
    vec![
        agg(CLEARANCE, TIME),
        agg("agg(clearance,time)", PROGRESS),
        agg(COMFORT_LAT, COMFORT_LONG),
    ]
}

pub fn preference_preset(name: &str) -> Result<Preference, DrivingError> {
    let apply = |p: Preference, ops: Vec<RefinementOp>| p.apply_all(&ops).expect("preset operations apply");
    Ok(match name {
        "A" => base_a(),
        "B" => apply(base_a(), ops_a_to_b()),
        "C" => apply(apply(base_a(), ops_a_to_b()), ops_b_to_c()),
        "D" => base_d(),
        "E" => apply(base_d(), ops_d_to_e()),
        _ => return Err(DrivingError::UnknownPreset(name.to_string())),
    })
}

/// The preset that `name` is refined from together with the operations, if any.
pub fn preset_parent(name: &str) -> Option<(&'static str, Vec<RefinementOp>)> {
    match name {
        "B" => Some(("A", ops_a_to_b())),
        "C" => Some(("B", ops_b_to_c())),
        "E" => Some(("D", ops_d_to_e())),
        _ => None,
    }
}
