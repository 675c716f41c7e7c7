//! Quadrant weights, the weighted map around a reported survivor, and the
//! prioritized waypoint ordering derived from it.
//!
//! Cells are split into four 90 degree sectors around the survivor's reported
//! heading. Each sector gets an integer base weight chosen so that the weight
//! ranges of different sectors can never overlap once scaled by proximity:
//!
//! ```text
//! w1 = w4*n^3 + n + n^2 + n^3      forward
//! w2 = (w1 - n) / n                left
//! w3 = (w1 - n - n^2) / n^2        right
//! w4                               rear (1 by default)
//! w5 = w1*n + 1                    survivor cell
//! ```
//!
//! A cell at Chebyshev ring `d` in sector `q` receives `(n - d + 1) * w_q`,
//! so ring 1 carries the sector maximum `n * w_q` and the outermost ring the
//! base weight itself.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_env::{Environment, GeometryError, GridIndex, WorldPoint};

/// Slack for sector boundaries; bearings computed through `atan2` land a few
/// ulps away from exact multiples of 45 degrees.
const BOUNDARY_EPS_DEG: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("weight arithmetic overflows 64 bits for n = {n}, w4 = {w4}")]
    Overflow { n: u64, w4: u64 },
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Last known survivor position and heading as relayed by an observer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivorReport {
    pub position: WorldPoint,
    /// Degrees counter-clockwise from +x, normalized to [0, 360).
    pub heading: f64,
    pub report_time: f64,
}

impl SurvivorReport {
    pub fn new(position: WorldPoint, heading: f64, report_time: f64) -> Self {
        Self { position, heading: normalize_heading(heading), report_time }
    }
}

pub fn normalize_heading(deg: f64) -> f64 {
    let h = deg.rem_euclid(360.0);
    // rem_euclid of a tiny negative value rounds up to 360.0
    if h >= 360.0 { 0.0 } else { h }
}

/// Wrap an angle into (-180, 180].
pub fn wrap_degrees(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w > 180.0 { w - 360.0 } else { w }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    Forward,
    Left,
    Right,
    Rear,
    SurvivorCell,
}

impl Quadrant {
    pub const SECTORS: [Quadrant; 4] = [Quadrant::Forward, Quadrant::Left, Quadrant::Right, Quadrant::Rear];

    /// 0 is explored first.
    pub fn priority(self) -> u8 {
        match self {
            Quadrant::SurvivorCell => 0,
            Quadrant::Forward => 1,
            Quadrant::Left => 2,
            Quadrant::Right => 3,
            Quadrant::Rear => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantWeights {
    pub n: u64,
    pub w1: u64,
    pub w2: u64,
    pub w3: u64,
    pub w4: u64,
    pub w5: u64,
}

impl QuadrantWeights {
    pub fn for_quadrant(&self, q: Quadrant) -> u64 {
        match q {
            Quadrant::Forward => self.w1,
            Quadrant::Left => self.w2,
            Quadrant::Right => self.w3,
            Quadrant::Rear => self.w4,
            Quadrant::SurvivorCell => self.w5,
        }
    }

    /// Highest weight a cell of this sector can receive (`n * w_q`).
    pub fn sector_max(&self, q: Quadrant) -> u64 {
        match q {
            Quadrant::SurvivorCell => self.w5,
            _ => self.n * self.for_quadrant(q),
        }
    }
}

/// Horizon `n`: largest Chebyshev ring from the survivor cell that still
/// holds grid cells. Never less than 1.
pub fn max_iterations(env: &Environment, survivor_cell: GridIndex) -> u64 {
    env.corners()
        .iter()
        .map(|c| c.chebyshev(&survivor_cell))
        .max()
        .unwrap_or(0)
        .max(1) as u64
}

pub fn base_weights(n: u64, w4: u64) -> Result<QuadrantWeights, WeightError> {
    if n == 0 || w4 == 0 {
        return Err(WeightError::InvalidParameter(format!("n and w4 must be >= 1, got n = {n}, w4 = {w4}")));
    }
    let overflow = || WeightError::Overflow { n, w4 };
    let n2 = n.checked_mul(n).ok_or_else(overflow)?;
    let n3 = n2.checked_mul(n).ok_or_else(overflow)?;
    let w1 = w4
        .checked_mul(n3)
        .and_then(|v| v.checked_add(n))
        .and_then(|v| v.checked_add(n2))
        .and_then(|v| v.checked_add(n3))
        .ok_or_else(overflow)?;
    let w2 = (w1 - n) / n;
    let w3 = (w1 - n - n2) / n2;
    let w5 = w1.checked_mul(n).and_then(|v| v.checked_add(1)).ok_or_else(overflow)?;
    debug_assert_eq!((w1 - n) % n, 0);
    debug_assert_eq!((w1 - n - n2) % n2, 0);
    Ok(QuadrantWeights { n, w1, w2, w3, w4, w5 })
}

/// Signed angle (degrees, in (-180, 180]) from the heading to the bearing
/// of `cell` as seen from `survivor_cell`, measured in the grid frame.
pub fn relative_bearing(survivor_cell: GridIndex, heading: f64, cell: GridIndex) -> f64 {
    let dx = cell.col as f64 - survivor_cell.col as f64;
    let dy = cell.row as f64 - survivor_cell.row as f64;
    wrap_degrees(dy.atan2(dx).to_degrees() - heading)
}

/// Sector of `cell` relative to the survivor. Boundary bearings go to the
/// higher-priority sector: +-45 is forward, +135 left, -135 right.
pub fn classify(survivor_cell: GridIndex, heading: f64, cell: GridIndex) -> Quadrant {
    if cell == survivor_cell {
        return Quadrant::SurvivorCell;
    }
    let delta = relative_bearing(survivor_cell, heading, cell);
    if delta.abs() <= 45.0 + BOUNDARY_EPS_DEG {
        Quadrant::Forward
    } else if delta > 0.0 && delta <= 135.0 + BOUNDARY_EPS_DEG {
        Quadrant::Left
    } else if (-135.0 - BOUNDARY_EPS_DEG..0.0).contains(&delta) {
        Quadrant::Right
    } else {
        Quadrant::Rear
    }
}

/// Integer weight per cell around one survivor report.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    env: Environment,
    survivor_cell: GridIndex,
    heading: f64,
    base: QuadrantWeights,
    weights: Vec<u64>,
    quadrants: Vec<Quadrant>,
}

impl WeightMap {
    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn survivor_cell(&self) -> GridIndex {
        self.survivor_cell
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn base(&self) -> &QuadrantWeights {
        &self.base
    }

    pub fn weight(&self, idx: GridIndex) -> u64 {
        self.weights[self.env.linear_index(idx)]
    }

    pub fn quadrant(&self, idx: GridIndex) -> Quadrant {
        self.quadrants[self.env.linear_index(idx)]
    }

    /// Row-major weights, row 0 (lowest y) first.
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.weights.chunks(self.env.cols())
    }
}

pub fn build_weight_map(env: &Environment, report: &SurvivorReport) -> Result<WeightMap, WeightError> {
    let survivor_cell = env.world_to_cell(report.position)?;
    let n = max_iterations(env, survivor_cell);
    let base = base_weights(n, 1)?;
    let heading = normalize_heading(report.heading);

    let mut weights = Vec::with_capacity(env.cell_count());
    let mut quadrants = Vec::with_capacity(env.cell_count());
    for cell in env.cells() {
        let q = classify(survivor_cell, heading, cell);
        let w = match q {
            Quadrant::SurvivorCell => base.w5,
            _ => {
                let d = cell.chebyshev(&survivor_cell) as u64;
                (n - d + 1) * base.for_quadrant(q)
            }
        };
        weights.push(w);
        quadrants.push(q);
    }
    Ok(WeightMap { env: env.clone(), survivor_cell, heading, base, weights, quadrants })
}

/// Ordered list of cells to visit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrioritizedPlan {
    waypoints: Vec<GridIndex>,
}

impl PrioritizedPlan {
    pub fn new(waypoints: Vec<GridIndex>) -> Self {
        Self { waypoints }
    }

    pub fn waypoints(&self) -> &[GridIndex] {
        &self.waypoints
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<GridIndex> {
        self.waypoints.get(i).copied()
    }
}

/// Angular deviation from the heading in micro-degrees. Quantized so that
/// mirror-image cells (+x and -x degrees) tie exactly.
pub fn deviation_key(survivor_cell: GridIndex, heading: f64, cell: GridIndex) -> u64 {
    if cell == survivor_cell {
        return 0;
    }
    (relative_bearing(survivor_cell, heading, cell).abs() * 1e6).round() as u64
}

/// Sort key: weight descending, then ring, then deviation, then row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PriorityKey {
    weight: u64,
    ring: usize,
    deviation: u64,
    linear: usize,
}

impl Ord for PriorityKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .cmp(&self.weight)
            .then(self.ring.cmp(&other.ring))
            .then(self.deviation.cmp(&other.deviation))
            .then(self.linear.cmp(&other.linear))
    }
}

impl PartialOrd for PriorityKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn prioritize(map: &WeightMap) -> PrioritizedPlan {
    let env = map.env();
    let mut keyed: Vec<(PriorityKey, GridIndex)> = env
        .cells()
        .map(|cell| {
            let key = PriorityKey {
                weight: map.weight(cell),
                ring: cell.chebyshev(&map.survivor_cell),
                deviation: deviation_key(map.survivor_cell, map.heading, cell),
                linear: env.linear_index(cell),
            };
            (key, cell)
        })
        .collect();
    keyed.sort_unstable_by_key(|&(key, _)| key);
    PrioritizedPlan::new(keyed.into_iter().map(|(_, c)| c).collect())
}
