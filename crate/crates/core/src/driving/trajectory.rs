//! Template-based trajectory generation.
//!
//! A template fixes a cruise speed, a delay before the speed change and a
//! lateral offset from the route. The vehicle follows the offset path with a
//! pure-pursuit steering law on a kinematic single-track model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::geometry::{distance, wrap_angle, Point, Polyline};
use super::scenario::{Limits, Scenario, TemplateConfig, Vehicle};
use super::DrivingError;

/// Arc length over which a lateral offset is blended in, m.
const OFFSET_RAMP: f64 = 10.0;
const MIN_LOOKAHEAD: f64 = 4.0;
/// Lookahead distance per unit speed, s.
const LOOKAHEAD_TIME: f64 = 0.8;
const LIMIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    /// Longitudinal acceleration applied from this sample to the next.
    pub a_long: f64,
    /// Lateral acceleration `v^2 * curvature` at this sample.
    pub a_lat: f64,
}

impl State {
    pub fn position(&self) -> Point {
        [self.x, self.y]
    }

    pub fn velocity(&self) -> Point {
        [self.speed * self.heading.cos(), self.speed * self.heading.sin()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub label: String,
    /// Samples at `dt` spacing starting at `t = 0`, truncated at the goal.
    pub states: Vec<State>,
    pub goal_reached_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Template {
    pub speed: f64,
    pub delay: f64,
    pub offset: f64,
}

impl Template {
    /// Stable label such as `v8_d1_o-0.5`.
    pub fn label(&self) -> String {
        // adding 0.0 turns -0.0 into 0.0
        format!("v{}_d{}_o{}", self.speed + 0.0, self.delay + 0.0, self.offset + 0.0)
    }
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

fn offset_point(route: &Polyline, offset: f64, s: f64) -> Point {
    let (p, h) = route.at(s);
    let o = offset * smoothstep(s / OFFSET_RAMP);
    [p[0] - o * h.sin(), p[1] + o * h.cos()]
}

/// Integrates one template over the horizon, stopping at the goal. The
/// result is not checked against the limits.
pub fn simulate_template(scenario: &Scenario, vehicle: &Vehicle, template: &Template) -> Trajectory {
    let route = scenario.route_of(vehicle);
    let path = Polyline::new(&route.points).expect("validated route");
    let limits = &scenario.limits;
    let ramp = scenario.templates_of(vehicle).speed_change;
    let dt = limits.dt;
    let steps = (limits.horizon / dt).round() as usize;

    let (start, mut heading) = path.at(0.0);
    let mut pos = start;
    let mut speed = vehicle.initial_speed;
    let mut states = Vec::new();
    let mut goal_reached_time = None;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let proj = path.project(pos);
        let lookahead = MIN_LOOKAHEAD.max(LOOKAHEAD_TIME * speed);
        let target = offset_point(&path, template.offset, proj.s + lookahead);
        let ld = distance(pos, target);
        let alpha = wrap_angle((target[1] - pos[1]).atan2(target[0] - pos[0]) - heading);
        let curvature = if ld > 0.0 { 2.0 * alpha.sin() / ld } else { 0.0 };
        let a_long = if t + 1e-9 < template.delay {
            0.0
        } else {
            let gap = template.speed - speed;
            gap.signum() * ramp.min(gap.abs() / dt)
        };
        states.push(State { t, x: pos[0], y: pos[1], heading, speed, a_long, a_lat: speed * speed * curvature });
        if distance(pos, route.goal.center) <= route.goal.radius {
            goal_reached_time = Some(t);
            break;
        }
        pos = [pos[0] + speed * dt * heading.cos(), pos[1] + speed * dt * heading.sin()];
        heading = wrap_angle(heading + speed * curvature * dt);
        speed = (speed + a_long * dt).max(0.0);
    }
    Trajectory { label: template.label(), states, goal_reached_time }
}

pub fn within_limits(trajectory: &Trajectory, limits: &Limits) -> bool {
    trajectory.states.iter().all(|s| {
        s.a_long.abs() <= limits.max_long_accel + LIMIT_TOLERANCE
            && s.a_lat.abs() <= limits.max_lat_accel + LIMIT_TOLERANCE
    })
}

/// Grid templates in speed-major order, followed by random draws labelled
/// `r0, r1, ..`.
pub fn expand_templates(cfg: &TemplateConfig, stream: u64) -> Vec<(String, Template)> {
    let mut out = Vec::new();
    for &speed in &cfg.speeds {
        for &delay in &cfg.delays {
            for &offset in &cfg.offsets {
                let t = Template { speed, delay, offset };
                out.push((t.label(), t));
            }
        }
    }
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    if cfg.random_samples > 0 && !cfg.speeds.is_empty() && !cfg.delays.is_empty() && !cfg.offsets.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        let (s, d, o) = (range(&cfg.speeds), range(&cfg.delays), range(&cfg.offsets));
        let mut draw = |(lo, hi): (f64, f64)| if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        for k in 0..cfg.random_samples {
            let t = Template { speed: draw(s), delay: draw(d), offset: draw(o) };
            out.push((format!("r{k}"), t));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|(label, _)| seen.insert(label.clone()));
    out
}

/// Feasible, goal-reaching trajectories of one vehicle.
pub fn generate_trajectories(scenario: &Scenario, player: usize) -> Result<Vec<Trajectory>, DrivingError> {
    let vehicle = &scenario.vehicles[player];
    let cfg = scenario.templates_of(vehicle);
    let out: Vec<Trajectory> = expand_templates(cfg, player as u64)
        .into_iter()
        .map(|(label, t)| Trajectory { label, ..simulate_template(scenario, vehicle, &t) })
        .filter(|tr| tr.goal_reached_time.is_some() && within_limits(tr, &scenario.limits))
        .collect();
    if out.is_empty() {
        return Err(DrivingError::NoFeasibleTrajectory { player: vehicle.id.clone() });
    }
    Ok(out)
}
