//! Fixed-step scenario simulation.
//!
//! A run starts with the UAV sweeping the grid in a lawn-mower pattern.
//! Under the weight-based planner the first observer report makes the UAV
//! break off, fly straight to the reported cell and then work through the
//! prioritized plan for that report. The run ends on detection (optionally
//! followed by a return leg to the start), plan exhaustion, or when the
//! flight-time budget is spent.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_env::{footprint_width, Environment, GeometryError, GridIndex, WorldPoint};
use crate::planners::{lawnmower_plan, weight_based_plan, PlanCursor, PlanError, PlannerKind};
use crate::weight_core::SurvivorReport;
use crate::world::{ObserverState, SurvivorMotion, SurvivorState, UavState};

/// Random stream used for world draws (observer placement).
const WORLD_STREAM: u64 = 0;
/// Random stream reserved for survivor heading changes.
const SURVIVOR_STREAM: u64 = 1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("illegal phase transition: {event:?} while {phase:?}")]
    IllegalTransition { phase: SimPhase, event: SimEvent },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartCorner {
    LowerLeft,
    LowerRight,
    UpperLeft,
    UpperRight,
}

impl StartCorner {
    pub fn cell(self, env: &Environment) -> GridIndex {
        let (c, r) = (env.cols() - 1, env.rows() - 1);
        match self {
            StartCorner::LowerLeft => GridIndex::new(0, 0),
            StartCorner::LowerRight => GridIndex::new(c, 0),
            StartCorner::UpperLeft => GridIndex::new(0, r),
            StartCorner::UpperRight => GridIndex::new(c, r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MotionKind {
    Linear,
    RandomHeading { change_period: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverSpec {
    pub position: WorldPoint,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ObserverLayout {
    Fixed(Vec<ObserverSpec>),
    /// Positions drawn uniformly over the environment from the run seed.
    Random { count: usize, radius: f64 },
}

impl ObserverLayout {
    pub fn resolve(&self, env: &Environment, rng: &mut impl Rng) -> Vec<ObserverSpec> {
        match self {
            ObserverLayout::Fixed(list) => list.clone(),
            ObserverLayout::Random { count, radius } => (0..*count)
                .map(|_| ObserverSpec {
                    position: WorldPoint::new(
                        rng.random_range(0.0..=env.width()),
                        rng.random_range(0.0..=env.height()),
                    ),
                    radius: *radius,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavParams {
    pub max_speed: f64,
    pub altitude: f64,
    pub fov_half_angle: f64,
    /// Flight-time budget in seconds.
    pub flight_time: f64,
    pub start_corner: StartCorner,
    /// Waypoint capture radius; `cell_size / 10` when unset.
    pub arrival_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorParams {
    pub start: WorldPoint,
    pub heading: f64,
    pub speed: f64,
    pub motion: MotionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub width: f64,
    pub height: f64,
    /// Grid pitch; the camera footprint when unset.
    pub cell_size: Option<f64>,
    pub planner: PlannerKind,
    pub uav: UavParams,
    pub survivor: SurvivorParams,
    pub observers: ObserverLayout,
    pub dt: f64,
    pub seed: u64,
    pub return_to_start: bool,
    pub record_trajectory: bool,
}

impl ScenarioConfig {
    pub fn footprint(&self) -> Result<f64, SimError> {
        Ok(footprint_width(self.uav.altitude, self.uav.fov_half_angle)?)
    }

    pub fn environment(&self) -> Result<Environment, SimError> {
        let cell = match self.cell_size {
            Some(c) => c,
            None => self.footprint()?,
        };
        Ok(Environment::new(self.width, self.height, cell)?)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("uav max_speed", self.uav.max_speed),
            ("uav flight_time", self.uav.flight_time),
            ("dt", self.dt),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(SimError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.dt > 1.0 {
            return Err(SimError::Config(format!("dt must not exceed 1 s, got {}", self.dt)));
        }
        let env = self.environment()?;
        if let Some(tol) = self.uav.arrival_tolerance {
            if !tol.is_finite() || tol < 0.0 {
                return Err(SimError::Config(format!("arrival_tolerance must be >= 0, got {tol}")));
            }
        }
        let s = &self.survivor;
        if !s.speed.is_finite() || s.speed < 0.0 {
            return Err(SimError::Config(format!("survivor speed must be >= 0, got {}", s.speed)));
        }
        if !s.heading.is_finite() {
            return Err(SimError::Config("survivor heading must be finite".into()));
        }
        if !env.contains(&s.start) {
            return Err(SimError::Config(format!(
                "survivor start ({}, {}) lies outside the environment",
                s.start.x, s.start.y
            )));
        }
        if let MotionKind::RandomHeading { change_period } = s.motion {
            if !change_period.is_finite() || change_period <= 0.0 {
                return Err(SimError::Config(format!("heading change period must be positive, got {change_period}")));
            }
        }
        match &self.observers {
            ObserverLayout::Fixed(list) => {
                for o in list {
                    if !o.radius.is_finite() || o.radius <= 0.0 {
                        return Err(SimError::Config(format!("observer radius must be positive, got {}", o.radius)));
                    }
                    if !env.contains(&o.position) {
                        return Err(SimError::Config(format!(
                            "observer ({}, {}) lies outside the environment",
                            o.position.x, o.position.y
                        )));
                    }
                }
            }
            ObserverLayout::Random { radius, .. } => {
                if !radius.is_finite() || *radius <= 0.0 {
                    return Err(SimError::Config(format!("observer radius must be positive, got {radius}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimPhase {
    Sweeping,
    Transit,
    WeightedSearch,
    Returning,
    Done,
}

impl SimPhase {
    pub fn name(self) -> &'static str {
        match self {
            SimPhase::Sweeping => "sweeping",
            SimPhase::Transit => "transit",
            SimPhase::WeightedSearch => "weighted-search",
            SimPhase::Returning => "returning",
            SimPhase::Done => "done",
        }
    }

    pub fn is_searching(self) -> bool {
        matches!(self, SimPhase::Sweeping | SimPhase::Transit | SimPhase::WeightedSearch)
    }

    /// `PlanExhausted` while returning means the UAV is back at its start.
    pub fn transition(self, event: SimEvent, return_to_start: bool) -> Result<SimPhase, SimError> {
        use SimEvent::*;
        use SimPhase::*;
        let next = match (self, event) {
            (Sweeping, ReportReceived) => Transit,
            (Transit, ArrivedAtReportCell) => WeightedSearch,
            (Sweeping | Transit | WeightedSearch, SurvivorFound) => {
                if return_to_start {
                    Returning
                } else {
                    Done
                }
            }
            (Sweeping | WeightedSearch | Returning, PlanExhausted) => Done,
            (Sweeping | Transit | WeightedSearch | Returning, TimeExhausted) => Done,
            (phase, event) => return Err(SimError::IllegalTransition { phase, event }),
        };
        Ok(next)
    }
}

impl fmt::Display for SimPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimEvent {
    ReportReceived,
    ArrivedAtReportCell,
    SurvivorFound,
    PlanExhausted,
    TimeExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agent {
    Uav,
    Survivor,
}

impl Agent {
    pub fn name(self) -> &'static str {
        match self {
            Agent::Uav => "uav",
            Agent::Survivor => "survivor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub agent: Agent,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub phase: SimPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Found,
    PlanExhausted,
    TimeExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub found: bool,
    /// Seconds from start to detection; elapsed search time when not found.
    pub search_time: f64,
    /// Steps until detection; steps searched when not found.
    pub iterations: u64,
    /// Wall-clock time spent inside planning calls.
    pub decision_time: Duration,
    pub report_time: Option<f64>,
    pub report: Option<SurvivorReport>,
    pub termination: Termination,
    /// Total steps including any return leg.
    pub total_steps: u64,
    pub trajectory: Vec<TrajectoryRecord>,
    pub phase_log: Vec<(f64, SimPhase)>,
}

fn timed<T>(acc: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *acc += start.elapsed();
    out
}

struct Runner<'a> {
    cfg: &'a ScenarioConfig,
    env: Environment,
    phase: SimPhase,
    phase_log: Vec<(f64, SimPhase)>,
}

impl Runner<'_> {
    fn advance(&mut self, event: SimEvent, t: f64) -> Result<(), SimError> {
        let next = self.phase.transition(event, self.cfg.return_to_start)?;
        if next != self.phase {
            self.phase = next;
            self.phase_log.push((t, next));
        }
        Ok(())
    }

    fn center(&self, idx: GridIndex) -> WorldPoint {
        self.env.cell_center(idx).expect("planner emitted a cell outside the grid")
    }

    /// Next waypoint that is not already under the UAV.
    fn next_target(&self, cursor: &mut PlanCursor, uav: &UavState) -> Option<WorldPoint> {
        while let Some(wp) = cursor.next_waypoint() {
            let p = self.center(wp);
            if uav.position.distance(&p) > uav.arrival_tolerance {
                return Some(p);
            }
        }
        None
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<SimOutcome, SimError> {
    cfg.validate()?;
    let env = cfg.environment()?;
    let mut runner = Runner { cfg, env: env.clone(), phase: SimPhase::Sweeping, phase_log: vec![(0.0, SimPhase::Sweeping)] };

    let mut world_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    world_rng.set_stream(WORLD_STREAM);
    let mut observers: Vec<ObserverState> = cfg
        .observers
        .resolve(&env, &mut world_rng)
        .into_iter()
        .map(|o| ObserverState::new(o.position, o.radius))
        .collect();

    let motion = match cfg.survivor.motion {
        MotionKind::Linear => SurvivorMotion::LinearFixedHeading,
        MotionKind::RandomHeading { change_period } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(SURVIVOR_STREAM);
            SurvivorMotion::random(change_period, rng)
        }
    };
    let mut survivor = SurvivorState::new(cfg.survivor.start, cfg.survivor.heading, cfg.survivor.speed, motion);

    let start_cell = cfg.uav.start_corner.cell(&env);
    let home = env.cell_center(start_cell)?;
    let mut uav = UavState {
        position: home,
        altitude: cfg.uav.altitude,
        max_speed: cfg.uav.max_speed,
        footprint: cfg.footprint()?,
        flight_time_budget: cfg.uav.flight_time,
        arrival_tolerance: cfg.uav.arrival_tolerance.unwrap_or(env.cell_size() / 10.0),
    };

    let mut decision_time = Duration::ZERO;
    let sweep = timed(&mut decision_time, || lawnmower_plan(&env, start_cell))?;
    let mut cursor = PlanCursor::new(sweep);
    let mut target = runner.next_target(&mut cursor, &uav);
    let mut pending_plan = None;

    let max_steps = (cfg.uav.flight_time / cfg.dt + 1e-9).floor() as u64;
    let mut trajectory = Vec::new();
    let mut report_time = None;
    let mut first_report = None;
    let mut detected_at = None;
    let mut termination = None;
    let mut step: u64 = 0;

    // A sweep over a grid with every cell under the start position is
    // already exhausted before the first step.
    if target.is_none() {
        runner.advance(SimEvent::PlanExhausted, 0.0)?;
        termination = Some(Termination::PlanExhausted);
    }

    while runner.phase != SimPhase::Done {
        if step >= max_steps {
            runner.advance(SimEvent::TimeExhausted, step as f64 * cfg.dt)?;
            termination.get_or_insert(Termination::TimeExhausted);
            break;
        }
        step += 1;
        let t = step as f64 * cfg.dt;
        let phase = runner.phase;

        survivor.step(cfg.dt, &env);
        let arrived = match target {
            Some(p) => uav.step_toward(p, cfg.dt),
            None => true,
        };
        if cfg.record_trajectory {
            trajectory.push(TrajectoryRecord {
                t,
                agent: Agent::Uav,
                x: uav.position.x,
                y: uav.position.y,
                z: uav.altitude,
                phase,
            });
            trajectory.push(TrajectoryRecord {
                t,
                agent: Agent::Survivor,
                x: survivor.position.x,
                y: survivor.position.y,
                z: 0.0,
                phase,
            });
        }

        if phase.is_searching() && uav.detects(&survivor) {
            detected_at = Some(step);
            termination = Some(Termination::Found);
            runner.advance(SimEvent::SurvivorFound, t)?;
            if runner.phase == SimPhase::Returning {
                target = Some(home);
            }
            continue;
        }

        let mut new_report = None;
        for o in observers.iter_mut() {
            if let Some(r) = o.check(&survivor, t) {
                report_time.get_or_insert(t);
                if first_report.is_none() {
                    first_report = Some(r);
                    new_report = Some(r);
                }
            }
        }
        if let Some(r) = new_report {
            if cfg.planner == PlannerKind::WeightBased && phase == SimPhase::Sweeping {
                runner.advance(SimEvent::ReportReceived, t)?;
                let plan = timed(&mut decision_time, || weight_based_plan(&env, &r))?;
                pending_plan = Some(plan);
                target = Some(runner.center(env.world_to_cell(r.position)?));
                continue;
            }
        }

        if !arrived {
            continue;
        }
        match runner.phase {
            SimPhase::Sweeping | SimPhase::WeightedSearch => {
                target = runner.next_target(&mut cursor, &uav);
                if target.is_none() {
                    runner.advance(SimEvent::PlanExhausted, t)?;
                    termination = Some(Termination::PlanExhausted);
                }
            }
            SimPhase::Transit => {
                runner.advance(SimEvent::ArrivedAtReportCell, t)?;
                cursor = PlanCursor::new(pending_plan.take().expect("transit without a weighted plan"));
                target = runner.next_target(&mut cursor, &uav);
                if target.is_none() {
                    runner.advance(SimEvent::PlanExhausted, t)?;
                    termination = Some(Termination::PlanExhausted);
                }
            }
            SimPhase::Returning => runner.advance(SimEvent::PlanExhausted, t)?,
            SimPhase::Done => {}
        }
    }

    let searched_steps = detected_at.unwrap_or(step);
    Ok(SimOutcome {
        found: detected_at.is_some(),
        search_time: searched_steps as f64 * cfg.dt,
        iterations: searched_steps,
        decision_time,
        report_time,
        report: first_report,
        termination: termination.unwrap_or(Termination::TimeExhausted),
        total_steps: step,
        trajectory,
        phase_log: runner.phase_log,
    })
}
