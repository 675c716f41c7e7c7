//! Waypoint planners: the boustrophedon (lawn-mower) baseline and the
//! weight-based ordering around a survivor report.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_env::{Environment, GridIndex};
use crate::weight_core::{build_weight_map, prioritize, PrioritizedPlan, SurvivorReport, WeightError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("lawn-mower start {0} is not a corner cell")]
    InvalidStart(GridIndex),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    LawnMower,
    WeightBased,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 2] = [PlannerKind::LawnMower, PlannerKind::WeightBased];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::LawnMower => "lawn-mower",
            PlannerKind::WeightBased => "weight-based",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lawn-mower" | "lawnmower" | "lm" => Ok(PlannerKind::LawnMower),
            "weight-based" | "weightbased" | "weight" | "wb" => Ok(PlannerKind::WeightBased),
            other => Err(format!("unknown planner `{other}` (expected lawn-mower or weight-based)")),
        }
    }
}

/// Serpentine sweep starting at a corner cell. Rows are visited in order
/// away from the start row, the first row running away from the start
/// column and each following row reversing direction.
pub fn lawnmower_plan(env: &Environment, start: GridIndex) -> Result<PrioritizedPlan, PlanError> {
    if !env.corners().contains(&start) {
        return Err(PlanError::InvalidStart(start));
    }
    let (cols, rows) = (env.cols(), env.rows());
    let row_order: Vec<usize> = if start.row == 0 { (0..rows).collect() } else { (0..rows).rev().collect() };
    let mut forward = start.col == 0;
    let mut waypoints = Vec::with_capacity(env.cell_count());
    for row in row_order {
        if forward {
            waypoints.extend((0..cols).map(|col| GridIndex::new(col, row)));
        } else {
            waypoints.extend((0..cols).rev().map(|col| GridIndex::new(col, row)));
        }
        forward = !forward;
    }
    Ok(PrioritizedPlan::new(waypoints))
}

/// Full-grid exploration order for a survivor report; the reported cell
/// comes first.
pub fn weight_based_plan(env: &Environment, report: &SurvivorReport) -> Result<PrioritizedPlan, PlanError> {
    Ok(prioritize(&build_weight_map(env, report)?))
}

/// Sequential reader over a plan.
#[derive(Debug, Clone)]
pub struct PlanCursor {
    plan: PrioritizedPlan,
    next_index: usize,
}

impl PlanCursor {
    pub fn new(plan: PrioritizedPlan) -> Self {
        Self { plan, next_index: 0 }
    }

    /// Next waypoint, or `None` once the plan is exhausted. Calls after
    /// exhaustion keep returning `None`.
    pub fn next_waypoint(&mut self) -> Option<GridIndex> {
        let wp = self.plan.get(self.next_index)?;
        self.next_index += 1;
        Some(wp)
    }

    pub fn next_index(&self) -> usize {
        self.next_index
    }

    pub fn plan(&self) -> &PrioritizedPlan {
        &self.plan
    }

    pub fn is_exhausted(&self) -> bool {
        self.next_index >= self.plan.len()
    }
}
