//! Weight-based UAV survivor search.
//!
//! An observer on the ground reports a survivor's last known position and
//! heading; the UAV abandons its lawn-mower sweep, flies to the reported cell
//! and explores the grid in descending order of integer cell weights. The
//! crate contains the weighting scheme, both planners, a deterministic
//! fixed-step simulator, and a Monte-Carlo harness comparing the two.

pub mod bench;
pub mod grid_env;
pub mod planners;
pub mod sim_engine;
pub mod weight_core;
pub mod world;

pub use grid_env::{make_environment, Environment, GridIndex, WorldPoint};
pub use planners::{lawnmower_plan, weight_based_plan, PlanCursor, PlannerKind};
pub use sim_engine::{run, ScenarioConfig, SimOutcome, SimPhase};
pub use weight_core::{base_weights, build_weight_map, prioritize, PrioritizedPlan, QuadrantWeights, SurvivorReport, WeightMap};
