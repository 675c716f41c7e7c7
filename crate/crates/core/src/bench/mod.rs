//! Batch experiments and file output: scenario files, the paired
//! Monte-Carlo harness, summary tables, and trajectory / weight-map dumps.

pub mod config;
pub mod export;
pub mod montecarlo;

use std::path::PathBuf;

use thiserror::Error;

use crate::planners::PlannerKind;
use crate::sim_engine::{ScenarioConfig, SimError};

pub use config::{load_config, parse_config, preset, PRESETS};
pub use export::{export_trajectory, export_weight_map, read_trajectory, write_trajectory, write_weight_map};
pub use montecarlo::{run_batch, run_montecarlo, AggregateReport, BatchRun, PlannerStats, RunRecord, Summary};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("run {run}: {source}")]
    Run {
        run: usize,
        #[source]
        source: SimError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Which world quantities are redrawn for every Monte-Carlo run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Randomize {
    pub observers: bool,
    pub survivor_start: bool,
    pub survivor_heading: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    pub base: ScenarioConfig,
    pub runs: usize,
    pub randomize: Randomize,
    pub planners: Vec<PlannerKind>,
    pub master_seed: u64,
    pub parallelism: usize,
    /// Keep per-step trajectories of every run (memory heavy).
    pub record_trajectories: bool,
}

impl BatchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.runs == 0 {
            return Err(BenchError::Config("runs must be >= 1".into()));
        }
        if self.parallelism == 0 {
            return Err(BenchError::Config("parallelism must be >= 1".into()));
        }
        if self.planners.is_empty() {
            return Err(BenchError::Config("at least one planner is required".into()));
        }
        Ok(())
    }
}
