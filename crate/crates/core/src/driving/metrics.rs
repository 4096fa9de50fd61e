//! The nine driving metrics.
//!
//! Personal metrics depend on a vehicle's own trajectory only and are
//! computed once per trajectory. Interaction metrics come from per-pair
//! caches: the first footprint overlap and the running minimum distance.

use crate::preference::OutcomeVector;

use super::geometry::{area_outside, convex_distance, convex_overlap, distance, rectangle, wrap_angle, Point, Polyline};
use super::presets::*;
use super::scenario::{Scenario, Vehicle};
use super::trajectory::Trajectory;
use super::DrivingError;

/// Grid that metric values are rounded to before they enter a game table.
pub const QUANTUM: f64 = 1e-6;

pub fn quantize(v: f64) -> f64 {
    let q = (v / QUANTUM).round() * QUANTUM;
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

fn footprint(v: &Vehicle, t: &Trajectory, k: usize) -> [Point; 4] {
    let s = &t.states[k];
    rectangle(s.x, s.y, s.heading, v.length, v.width)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersonalMetrics {
    pub area_violation: f64,
    pub time: f64,
    pub progress: f64,
    pub comfort_long: f64,
    pub comfort_lat: f64,
    pub deviation_lat: f64,
    pub deviation_heading: f64,
}

/// Integrals use the left rectangle rule over the intervals before the last
/// sample.
pub fn personal_metrics(scenario: &Scenario, player: usize, t: &Trajectory) -> PersonalMetrics {
    let v = &scenario.vehicles[player];
    let route = scenario.route_of(v);
    let path = Polyline::new(&route.points).expect("validated route");
    let dt = scenario.limits.dt;
    let n = t.states.len().saturating_sub(1);
    let mut m = PersonalMetrics {
        area_violation: 0.0,
        time: t.goal_reached_time.unwrap_or(scenario.limits.horizon),
        progress: 0.0,
        comfort_long: 0.0,
        comfort_lat: 0.0,
        deviation_lat: 0.0,
        deviation_heading: 0.0,
    };
    for (k, s) in t.states[..n].iter().enumerate() {
        let proj = path.project(s.position());
        m.area_violation += area_outside(&footprint(v, t, k), &scenario.drivable_area) * dt;
        m.comfort_long += s.a_long.abs() * dt;
        m.comfort_lat += s.a_lat.abs() * dt;
        m.deviation_lat += proj.lateral.abs() * dt;
        m.deviation_heading += wrap_angle(s.heading - proj.heading).abs() * dt;
    }
    if t.goal_reached_time.is_none() {
        if let Some(last) = t.states.last() {
            let goal_s = path.project(route.goal.center).s;
            m.progress = (goal_s - path.project(last.position()).s).max(0.0);
        }
    }
    m
}

/// Interaction data of one trajectory pair over their common samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInteraction {
    /// First sample at which the footprints overlap.
    pub first_overlap: Option<usize>,
    /// `min_distance[k]` is the least footprint distance over samples `0..=k`.
    /// Values at or above the safety distance may be lower bounds only.
    pub min_distance: Vec<f64>,
    /// Relative speed squared at the first overlap.
    pub rel_speed_sq: f64,
}

pub fn pair_interaction(
    scenario: &Scenario,
    (i, ti): (usize, &Trajectory),
    (j, tj): (usize, &Trajectory),
) -> PairInteraction {
    let (vi, vj) = (&scenario.vehicles[i], &scenario.vehicles[j]);
    let reach = (vi.length.hypot(vi.width) + vj.length.hypot(vj.width)) / 2.0;
    let d_safe = scenario.limits.safe_distance;
    let n = ti.states.len().min(tj.states.len());
    let mut out = PairInteraction { first_overlap: None, min_distance: Vec::with_capacity(n), rel_speed_sq: 0.0 };
    let mut running = f64::INFINITY;
    for k in 0..n {
        let (si, sj) = (&ti.states[k], &tj.states[k]);
        let bound = distance(si.position(), sj.position()) - reach;
        let d = if bound >= d_safe {
            bound
        } else {
            let (fi, fj) = (footprint(vi, ti, k), footprint(vj, tj, k));
            if out.first_overlap.is_none() && convex_overlap(&fi, &fj) {
                out.first_overlap = Some(k);
                let (a, b) = (si.velocity(), sj.velocity());
                out.rel_speed_sq = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
            }
            convex_distance(&fi, &fj)
        };
        running = running.min(d);
        out.min_distance.push(running);
    }
    out
}

pub fn reduced_mass(a: f64, b: f64) -> f64 {
    a * b / (a + b)
}

/// Per-player interaction metrics of one joint profile. Collisions are
/// resolved in time order; a vehicle that has collided takes no part in
/// later collisions or clearance measurements.
pub fn interaction_metrics<'p>(
    scenario: &Scenario,
    lengths: &[usize],
    pair: &dyn Fn(usize, usize) -> &'p PairInteraction,
) -> Vec<(f64, f64)> {
    let n = lengths.len();
    let mut events = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(k) = pair(i, j).first_overlap {
                events.push((k, i, j));
            }
        }
    }
    events.sort_unstable();
    let mut frozen: Vec<Option<usize>> = vec![None; n];
    let mut energy = vec![0.0; n];
    for (k, i, j) in events {
        if frozen[i].map_or(true, |f| f >= k) && frozen[j].map_or(true, |f| f >= k) {
            let (mi, mj) = (scenario.vehicles[i].mass, scenario.vehicles[j].mass);
            let e = 0.5 * reduced_mass(mi, mj) * pair(i, j).rel_speed_sq;
            energy[i] += e;
            energy[j] += e;
            frozen[i] = Some(k);
            frozen[j] = Some(k);
        }
    }
    let last: Vec<usize> = (0..n).map(|i| frozen[i].unwrap_or(lengths[i] - 1)).collect();
    let d_safe = scenario.limits.safe_distance;
    (0..n)
        .map(|i| {
            let closest = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let p = if i < j { pair(i, j) } else { pair(j, i) };
                    p.min_distance[last[i].min(last[j])]
                })
                .fold(f64::INFINITY, f64::min);
            (energy[i], (d_safe - closest).max(0.0))
        })
        .collect()
}

/// Outcome vector with the nine metrics, quantized.
pub fn outcome_vector(personal: &PersonalMetrics, collision_energy: f64, clearance: f64) -> OutcomeVector {
    [
        (COLLISION_ENERGY, collision_energy),
        (AREA_VIOLATION, personal.area_violation),
        (CLEARANCE, clearance),
        (TIME, personal.time),
        (PROGRESS, personal.progress),
        (COMFORT_LONG, personal.comfort_long),
        (COMFORT_LAT, personal.comfort_lat),
        (DEVIATION_LAT, personal.deviation_lat),
        (DEVIATION_HEADING, personal.deviation_heading),
    ]
    .into_iter()
    .map(|(k, v)| (k, quantize(v)))
    .collect()
}

/// All metrics of one joint trajectory profile, computed from scratch.
pub fn evaluate_metrics(scenario: &Scenario, profile: &[&Trajectory]) -> Result<Vec<OutcomeVector>, DrivingError> {
    if profile.len() != scenario.vehicles.len() {
        return Err(DrivingError::InvalidScenario(format!(
            "profile has {} trajectories for {} vehicles",
            profile.len(),
            scenario.vehicles.len()
        )));
    }
    let dt = scenario.limits.dt;
    for t in profile {
        let bad = t.states.iter().enumerate().any(|(k, s)| (s.t - k as f64 * dt).abs() > 1e-9)
            || t.states.is_empty()
            || t.states.last().unwrap().t > scenario.limits.horizon + 1e-9;
        if bad {
            return Err(DrivingError::SamplingMismatch(t.label.clone()));
        }
    }
    let n = profile.len();
    let mut pairs = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            pairs[i][j] = Some(pair_interaction(scenario, (i, profile[i]), (j, profile[j])));
        }
    }
    let lengths: Vec<usize> = profile.iter().map(|t| t.states.len()).collect();
    let inter = interaction_metrics(scenario, &lengths, &|i, j| pairs[i][j].as_ref().unwrap());
    Ok((0..n)
        .map(|i| {
            let p = personal_metrics(scenario, i, profile[i]);
            outcome_vector(&p, inter[i].0, inter[i].1)
        })
        .collect())
}
