//! Scenario description: road layout, vehicles, routes and limits.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::geometry::{is_simple, point_in_polygon, Point};
use super::DrivingError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goal {
    pub center: Point,
    pub radius: f64,
}

/// Reference polyline a vehicle follows and the region it must reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Route {
    pub points: Vec<Point>,
    pub goal: Goal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vehicle {
    pub id: String,
    pub route: String,
    pub length: f64,
    pub width: f64,
    /// kg
    pub mass: f64,
    /// m/s
    pub initial_speed: f64,
    /// Overrides the scenario-wide templates for this vehicle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<TemplateConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    /// s
    pub dt: f64,
    /// s
    pub horizon: f64,
    /// m/s^2
    pub max_long_accel: f64,
    /// m/s^2
    pub max_lat_accel: f64,
    /// m
    pub safe_distance: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { dt: 0.2, horizon: 20.0, max_long_accel: 3.0, max_lat_accel: 4.0, safe_distance: 1.5 }
    }
}

/// Grid of trajectory templates: cruise speeds x start delays x lateral
/// offsets, plus optional random draws within the grid's ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateConfig {
    /// m/s
    pub speeds: Vec<f64>,
    /// s the initial speed is held before changing to the cruise speed
    pub delays: Vec<f64>,
    /// m, positive to the left of the route
    pub offsets: Vec<f64>,
    /// m/s^2 used to reach the cruise speed
    #[serde(default = "default_speed_change")]
    pub speed_change: f64,
    #[serde(default)]
    pub random_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_speed_change() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Disjoint simple polygons, in m.
    pub drivable_area: Vec<Vec<Point>>,
    pub routes: BTreeMap<String, Route>,
    pub vehicles: Vec<Vehicle>,
    #[serde(default)]
    pub limits: Limits,
    pub templates: TemplateConfig,
    /// Vehicle id to preference preset name.
    #[serde(default)]
    pub presets: BTreeMap<String, String>,
}

pub const ROAD_HALF_WIDTH: f64 = 3.5;
const ARM: f64 = 30.0;

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, DrivingError> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn route_of(&self, vehicle: &Vehicle) -> &Route {
        &self.routes[&vehicle.route]
    }

    pub fn templates_of<'a>(&'a self, vehicle: &'a Vehicle) -> &'a TemplateConfig {
        vehicle.templates.as_ref().unwrap_or(&self.templates)
    }

    pub fn validate(&self) -> Result<(), DrivingError> {
        let bad = |m: String| Err(DrivingError::InvalidScenario(m));
        let l = &self.limits;
        if !(l.dt > 0.0 && l.horizon > 0.0) {
            return bad("dt and horizon must be positive".into());
        }
        let steps = l.horizon / l.dt;
        if (steps - steps.round()).abs() > 1e-9 {
            return bad(format!("horizon {} is not a multiple of dt {}", l.horizon, l.dt));
        }
        if !(l.max_long_accel > 0.0 && l.max_lat_accel > 0.0 && l.safe_distance >= 0.0) {
            return bad("acceleration limits must be positive".into());
        }
        if self.drivable_area.is_empty() {
            return bad("no drivable area".into());
        }
        for poly in &self.drivable_area {
            if !is_simple(poly) {
                return bad("drivable polygons must be simple".into());
            }
        }
        let inside = |p: Point| self.drivable_area.iter().any(|poly| point_in_polygon(p, poly));
        for (id, r) in &self.routes {
            if r.points.len() < 2 {
                return bad(format!("route {id} needs at least two points"));
            }
            if !inside(*r.points.last().unwrap()) {
                return bad(format!("route {id} ends outside the drivable area"));
            }
            if !(r.goal.radius > 0.0) {
                return bad(format!("route {id} has a nonpositive goal radius"));
            }
        }
        let mut ids = BTreeSet::new();
        for v in &self.vehicles {
            if !ids.insert(v.id.as_str()) {
                return bad(format!("duplicate vehicle {}", v.id));
            }
            if v.id.contains('/') || v.id.is_empty() {
                return bad(format!("vehicle id `{}` must be nonempty without '/'", v.id));
            }
            if !self.routes.contains_key(&v.route) {
                return bad(format!("vehicle {} uses unknown route {}", v.id, v.route));
            }
            if !(v.length > 0.0 && v.width > 0.0 && v.mass > 0.0 && v.initial_speed >= 0.0) {
                return bad(format!("vehicle {} has invalid dimensions, mass or speed", v.id));
            }
            let t = self.templates_of(v);
            if t.speeds.iter().chain(&t.delays).any(|x| !x.is_finite() || *x < 0.0)
                || t.offsets.iter().any(|x| !x.is_finite())
                || !(t.speed_change > 0.0)
            {
                return bad(format!("vehicle {} has invalid templates", v.id));
            }
        }
        if self.vehicles.is_empty() {
            return bad("no vehicles".into());
        }
        for id in self.presets.keys() {
            if !ids.contains(id.as_str()) {
                return bad(format!("preset given for unknown vehicle {id}"));
            }
        }
        Ok(())
    }

    /// Four-way intersection of two two-lane roads with three vehicles:
    /// P1 northbound and P2 eastbound go straight, P3 arrives from the east
    /// and turns left to the south.
    pub fn intersection() -> Self {
        let w = ROAD_HALF_WIDTH;
        let lane = w / 2.0;
        let plus = vec![
            [-w, -ARM], [w, -ARM], [w, -w], [ARM, -w], [ARM, w], [w, w],
            [w, ARM], [-w, ARM], [-w, w], [-ARM, w], [-ARM, -w], [-w, -w],
        ];
        let mut routes = BTreeMap::new();
        routes.insert(
            "north".to_string(),
            Route {
                points: vec![[lane, -20.0], [lane, ARM - 2.0]],
                goal: Goal { center: [lane, 15.0], radius: 2.5 },
            },
        );
        routes.insert(
            "east".to_string(),
            Route {
                points: vec![[-20.0, -lane], [ARM - 2.0, -lane]],
                goal: Goal { center: [15.0, -lane], radius: 2.5 },
            },
        );
        // left turn from the westbound lane into the southbound lane
        let radius = 6.0;
        let center = [-lane + radius, lane - radius];
        let mut turn = vec![[20.0, lane]];
        let n = 24;
        for k in 0..=n {
            let a = FRAC_PI_2 + (k as f64) / (n as f64) * FRAC_PI_2;
            turn.push([center[0] + radius * a.cos(), center[1] + radius * a.sin()]);
        }
        turn.push([-lane, -(ARM - 2.0)]);
        debug_assert!((turn[1][1] - lane).abs() < 1e-9 && (turn[n + 1][0] + lane).abs() < 1e-9);
        routes.insert(
            "left_turn".to_string(),
            Route { points: turn, goal: Goal { center: [-lane, -15.0], radius: 2.5 } },
        );

        let vehicle = |id: &str, route: &str, speed: f64, templates: Option<TemplateConfig>| Vehicle {
            id: id.into(),
            route: route.into(),
            length: 4.5,
            width: 1.8,
            mass: 1500.0,
            initial_speed: speed,
            templates,
        };
        let turning = TemplateConfig {
            speeds: vec![2.5, 3.5, 4.5, 6.0],
            delays: vec![0.0, 1.0, 2.0],
            offsets: vec![-0.4, 0.0, 0.4],
            speed_change: 2.0,
            random_samples: 0,
            seed: 0,
        };
        Scenario {
            drivable_area: vec![plus],
            routes,
            vehicles: vec![
                vehicle("P1", "north", 7.0, None),
                vehicle("P2", "east", 7.0, None),
                vehicle("P3", "left_turn", 4.0, Some(turning)),
            ],
            limits: Limits::default(),
            templates: TemplateConfig {
                speeds: vec![4.0, 6.0, 8.0, 10.0],
                delays: vec![0.0, 1.0, 2.0],
                offsets: vec![-0.5, 0.0, 0.5],
                speed_change: 2.0,
                random_samples: 0,
                seed: 0,
            },
            presets: [("P1", "A"), ("P2", "D"), ("P3", "D")]
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }
}
