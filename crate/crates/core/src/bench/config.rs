//! Scenario files.
//!
//! A scenario is a flat TOML document: every key sits at the top level and
//! mirrors a field of [`ScenarioConfig`] or [`BatchConfig`]. Unknown keys are
//! rejected. Every key except `width` and `height` has a default.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `width`, `height` | required | environment extent (m) |
//! | `cell_size` | camera footprint | grid pitch (m) |
//! | `planner` | `"weight-based"` | `lawn-mower` or `weight-based` |
//! | `uav_max_speed` | 12 | m/s |
//! | `uav_altitude` | 9 | m |
//! | `uav_fov_half_angle` | 45 | degrees |
//! | `flight_time` | 1800 | s |
//! | `start_corner` | `"upper-left"` | `lower-left`, `lower-right`, `upper-left`, `upper-right` |
//! | `arrival_tolerance` | `cell_size / 10` | waypoint capture radius (m) |
//! | `survivor_x`, `survivor_y` | environment center | survivor start (m) |
//! | `survivor_heading` | 0 | degrees CCW from +x |
//! | `survivor_speed` | 0.6 | m/s |
//! | `survivor_motion` | `"linear"` | `linear` or `random-heading` |
//! | `heading_change_period` | 30 | s, for `random-heading` |
//! | `observers` | `[]` | fixed observers as `[[x, y, radius], ...]` |
//! | `observer_count` | 0 | randomly placed observers when `observers` is empty |
//! | `observer_radius` | 30 | radius of randomly placed observers (m) |
//! | `dt` | 0.1 | step (s) |
//! | `seed` | 0 | run seed |
//! | `return_to_start` | false | fly home after detection |
//! | `runs` | 1 | Monte-Carlo runs |
//! | `planners` | both | planners compared by `mc` |
//! | `randomize_observers` | false | redraw observer positions per run |
//! | `randomize_survivor_start` | false | redraw survivor start per run |
//! | `randomize_survivor_heading` | false | redraw survivor heading per run |
//! | `master_seed` | `seed` | Monte-Carlo master seed |
//! | `parallelism` | 1 | worker threads for `mc` |

use std::path::Path;

use serde::Deserialize;

use super::{BatchConfig, BenchError, Randomize};
use crate::grid_env::WorldPoint;
use crate::planners::PlannerKind;
use crate::sim_engine::{
    MotionKind, ObserverLayout, ObserverSpec, ScenarioConfig, StartCorner, SurvivorParams, UavParams,
};

/// Built-in scenarios, by name.
pub const PRESETS: [(&str, &str); 4] = [
    ("ros20", include_str!("../../presets/ros20.toml")),
    ("ros18", include_str!("../../presets/ros18.toml")),
    ("phys10", include_str!("../../presets/phys10.toml")),
    ("table1", include_str!("../../presets/table1.toml")),
];

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum MotionName {
    Linear,
    RandomHeading,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    width: f64,
    height: f64,
    cell_size: Option<f64>,
    planner: Option<String>,
    uav_max_speed: Option<f64>,
    uav_altitude: Option<f64>,
    uav_fov_half_angle: Option<f64>,
    flight_time: Option<f64>,
    start_corner: Option<StartCorner>,
    arrival_tolerance: Option<f64>,
    survivor_x: Option<f64>,
    survivor_y: Option<f64>,
    survivor_heading: Option<f64>,
    survivor_speed: Option<f64>,
    survivor_motion: Option<MotionName>,
    heading_change_period: Option<f64>,
    #[serde(default)]
    observers: Vec<[f64; 3]>,
    observer_count: Option<usize>,
    observer_radius: Option<f64>,
    dt: Option<f64>,
    seed: Option<u64>,
    return_to_start: Option<bool>,
    runs: Option<usize>,
    planners: Option<Vec<String>>,
    #[serde(default)]
    randomize_observers: bool,
    #[serde(default)]
    randomize_survivor_start: bool,
    #[serde(default)]
    randomize_survivor_heading: bool,
    master_seed: Option<u64>,
    parallelism: Option<usize>,
}

fn planner(name: &str) -> Result<PlannerKind, BenchError> {
    name.parse().map_err(BenchError::Config)
}

impl ScenarioFile {
    fn into_batch(self) -> Result<BatchConfig, BenchError> {
        let observers = if !self.observers.is_empty() {
            if self.observer_count.is_some() {
                return Err(BenchError::Config("give either `observers` or `observer_count`, not both".into()));
            }
            ObserverLayout::Fixed(
                self.observers
                    .iter()
                    .map(|&[x, y, radius]| ObserverSpec { position: WorldPoint::new(x, y), radius })
                    .collect(),
            )
        } else {
            match self.observer_count {
                Some(count) if count > 0 => {
                    ObserverLayout::Random { count, radius: self.observer_radius.unwrap_or(30.0) }
                }
                _ => ObserverLayout::Fixed(Vec::new()),
            }
        };
        let motion = match self.survivor_motion.unwrap_or(MotionName::Linear) {
            MotionName::Linear => MotionKind::Linear,
            MotionName::RandomHeading => {
                MotionKind::RandomHeading { change_period: self.heading_change_period.unwrap_or(30.0) }
            }
        };
        let seed = self.seed.unwrap_or(0);
        let base = ScenarioConfig {
            width: self.width,
            height: self.height,
            cell_size: self.cell_size,
            planner: planner(self.planner.as_deref().unwrap_or("weight-based"))?,
            uav: UavParams {
                max_speed: self.uav_max_speed.unwrap_or(12.0),
                altitude: self.uav_altitude.unwrap_or(9.0),
                fov_half_angle: self.uav_fov_half_angle.unwrap_or(45.0),
                flight_time: self.flight_time.unwrap_or(1800.0),
                start_corner: self.start_corner.unwrap_or(StartCorner::UpperLeft),
                arrival_tolerance: self.arrival_tolerance,
            },
            survivor: SurvivorParams {
                start: WorldPoint::new(
                    self.survivor_x.unwrap_or(self.width / 2.0),
                    self.survivor_y.unwrap_or(self.height / 2.0),
                ),
                heading: self.survivor_heading.unwrap_or(0.0),
                speed: self.survivor_speed.unwrap_or(0.6),
                motion,
            },
            observers,
            dt: self.dt.unwrap_or(0.1),
            seed,
            return_to_start: self.return_to_start.unwrap_or(false),
            record_trajectory: true,
        };
        base.validate().map_err(|e| BenchError::Config(e.to_string()))?;

        let planners = match self.planners {
            Some(names) => names.iter().map(|n| planner(n)).collect::<Result<Vec<_>, _>>()?,
            None => PlannerKind::ALL.to_vec(),
        };
        let batch = BatchConfig {
            base,
            runs: self.runs.unwrap_or(1),
            randomize: Randomize {
                observers: self.randomize_observers,
                survivor_start: self.randomize_survivor_start,
                survivor_heading: self.randomize_survivor_heading,
            },
            planners,
            master_seed: self.master_seed.unwrap_or(seed),
            parallelism: self.parallelism.unwrap_or(1),
            record_trajectories: false,
        };
        batch.validate()?;
        Ok(batch)
    }
}

/// Parse a scenario document. Scenario and batch keys share one file.
pub fn parse_config(text: &str) -> Result<BatchConfig, BenchError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
    file.into_batch()
}

pub fn load_config(path: &Path) -> Result<BatchConfig, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text).map_err(|e| match e {
        BenchError::Config(msg) => BenchError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn preset(name: &str) -> Result<BatchConfig, BenchError> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| BenchError::Config(format!("unknown preset `{name}`")))?;
    parse_config(text)
}
