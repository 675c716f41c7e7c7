//! Agent models: the moving survivor, static ground observers, and the UAV
//! as a speed-limited point mass carrying a square downward camera footprint.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::grid_env::{Environment, WorldPoint};
use crate::weight_core::{normalize_heading, SurvivorReport};

/// Heading changes closer than this to a period boundary count as due.
const PERIOD_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum SurvivorMotion {
    LinearFixedHeading,
    /// Uniformly redrawn heading every `change_period` seconds, from a
    /// stream owned by the survivor alone.
    RandomHeadingPersistence { change_period: f64, rng: ChaCha8Rng, since_change: f64 },
}

impl SurvivorMotion {
    pub fn random(change_period: f64, rng: ChaCha8Rng) -> Self {
        SurvivorMotion::RandomHeadingPersistence { change_period, rng, since_change: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct SurvivorState {
    pub position: WorldPoint,
    /// Degrees counter-clockwise from +x.
    pub heading: f64,
    pub speed: f64,
    pub motion: SurvivorMotion,
}

impl SurvivorState {
    pub fn new(position: WorldPoint, heading: f64, speed: f64, motion: SurvivorMotion) -> Self {
        Self { position, heading: normalize_heading(heading), speed, motion }
    }

    /// Advance by `dt`, reflecting off the environment walls.
    pub fn step(&mut self, dt: f64, env: &Environment) {
        if let SurvivorMotion::RandomHeadingPersistence { change_period, rng, since_change } = &mut self.motion {
            *since_change += dt;
            if *since_change + PERIOD_EPS >= *change_period {
                *since_change = 0.0;
                self.heading = rng.random_range(0.0..360.0);
            }
        }
        if self.speed == 0.0 {
            return;
        }
        let dist = self.speed * dt;
        let rad = self.heading.to_radians();
        let mut x = self.position.x + dist * rad.cos();
        let mut y = self.position.y + dist * rad.sin();
        let mut heading = self.heading;

        let (w, h) = (env.width(), env.height());
        while !(0.0..=w).contains(&x) {
            x = if x > w { 2.0 * w - x } else { -x };
            heading = 180.0 - heading;
        }
        while !(0.0..=h).contains(&y) {
            y = if y > h { 2.0 * h - y } else { -y };
            heading = -heading;
        }
        self.position = WorldPoint::new(x, y);
        self.heading = normalize_heading(heading);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverState {
    pub position: WorldPoint,
    pub radius: f64,
    pub has_reported: bool,
}

impl ObserverState {
    pub fn new(position: WorldPoint, radius: f64) -> Self {
        Self { position, radius, has_reported: false }
    }

    /// Single-shot report once the survivor is within the surveillance
    /// radius (inclusive).
    pub fn check(&mut self, survivor: &SurvivorState, t: f64) -> Option<SurvivorReport> {
        if self.has_reported || self.position.distance(&survivor.position) > self.radius {
            return None;
        }
        self.has_reported = true;
        Some(SurvivorReport::new(survivor.position, survivor.heading, t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UavState {
    pub position: WorldPoint,
    pub altitude: f64,
    pub max_speed: f64,
    /// Side of the square camera footprint.
    pub footprint: f64,
    pub flight_time_budget: f64,
    pub arrival_tolerance: f64,
}

impl UavState {
    /// Fly straight at `target` for one step. Returns whether the UAV is
    /// now within the arrival tolerance.
    pub fn step_toward(&mut self, target: WorldPoint, dt: f64) -> bool {
        let dx = target.x - self.position.x;
        let dy = target.y - self.position.y;
        let dist = dx.hypot(dy);
        let reach = self.max_speed * dt;
        if dist <= reach {
            self.position = target;
        } else {
            let s = reach / dist;
            self.position = WorldPoint::new(self.position.x + dx * s, self.position.y + dy * s);
        }
        self.position.distance(&target) <= self.arrival_tolerance
    }

    pub fn detects(&self, survivor: &SurvivorState) -> bool {
        let half = self.footprint / 2.0;
        (self.position.x - survivor.position.x).abs() <= half && (self.position.y - survivor.position.y).abs() <= half
    }
}
