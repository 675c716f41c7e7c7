//! Paired Monte-Carlo comparison of planners.
//!
//! Run `i` draws its world (survivor start and heading, observer positions,
//! run seed) from stream `i` of the master-seeded generator, and every
//! planner is evaluated against that same draw.

use std::fmt::Write as _;
use std::time::Duration;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{BatchConfig, BenchError};
use crate::grid_env::WorldPoint;
use crate::planners::PlannerKind;
use crate::sim_engine::{run, ObserverLayout, ScenarioConfig, SimOutcome};

#[derive(Debug, Clone)]
pub struct BatchRun {
    pub run: usize,
    pub planner: PlannerKind,
    pub scenario: ScenarioConfig,
    pub outcome: SimOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub planner: PlannerKind,
    pub seed: u64,
    pub found: bool,
    pub search_time: f64,
    pub iterations: u64,
    pub report_time: Option<f64>,
    #[serde(skip)]
    pub decision_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub stddev: f64,
}

impl Summary {
    /// Sample statistics; `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        let stddev = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Some(Summary { count: n, mean, median, stddev })
    }
}

/// Per-planner aggregates. Time metrics cover found runs only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannerStats {
    pub planner: PlannerKind,
    pub runs: usize,
    pub found: usize,
    pub find_rate: f64,
    pub search_time: Option<Summary>,
    pub iterations: Option<Summary>,
    #[serde(skip)]
    pub decision_time: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub planners: Vec<PlannerStats>,
    /// Mean lawn-mower search time over mean weight-based search time.
    pub speedup: Option<f64>,
    pub runs: Vec<RunRecord>,
}

fn scenario_for_run(cfg: &BatchConfig, run: usize) -> ScenarioConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    rng.set_stream(run as u64);
    let mut sc = cfg.base.clone();
    sc.seed = rng.next_u64();
    sc.record_trajectory = cfg.record_trajectories;
    // fixed draw order keeps runs comparable when flags change
    let start = WorldPoint::new(rng.random_range(0.0..=sc.width), rng.random_range(0.0..=sc.height));
    let heading = rng.random_range(0.0..360.0);
    if cfg.randomize.survivor_start {
        sc.survivor.start = start;
    }
    if cfg.randomize.survivor_heading {
        sc.survivor.heading = heading;
    }
    if cfg.randomize.observers {
        sc.observers = match &sc.observers {
            ObserverLayout::Fixed(list) => ObserverLayout::Fixed(
                list.iter()
                    .map(|o| {
                        let mut o = *o;
                        o.position = WorldPoint::new(rng.random_range(0.0..=sc.width), rng.random_range(0.0..=sc.height));
                        o
                    })
                    .collect(),
            ),
            random => random.clone(),
        };
    }
    sc
}

/// Execute every (run, planner) pair, ordered by run then planner list.
pub fn run_batch(cfg: &BatchConfig) -> Result<Vec<BatchRun>, BenchError> {
    cfg.validate()?;
    let jobs: Vec<(usize, PlannerKind, ScenarioConfig)> = (0..cfg.runs)
        .flat_map(|i| {
            let sc = scenario_for_run(cfg, i);
            cfg.planners.iter().map(move |&p| (i, p, ScenarioConfig { planner: p, ..sc.clone() }))
        })
        .collect();

    let exec = |(i, planner, scenario): (usize, PlannerKind, ScenarioConfig)| {
        run(&scenario)
            .map(|outcome| BatchRun { run: i, planner, scenario, outcome })
            .map_err(|source| BenchError::Run { run: i, source })
    };

    let results: Vec<Result<BatchRun, BenchError>> = if cfg.parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| BenchError::Config(format!("cannot start worker pool: {e}")))?;
        pool.install(|| jobs.into_par_iter().map(exec).collect())
    } else {
        jobs.into_iter().map(exec).collect()
    };
    // collect() on an indexed parallel iterator preserves job order, so the
    // first error is the lowest failing run index.
    results.into_iter().collect()
}

pub fn aggregate(runs: &[BatchRun], planners: &[PlannerKind]) -> AggregateReport {
    let records: Vec<RunRecord> = runs
        .iter()
        .map(|r| RunRecord {
            run: r.run,
            planner: r.planner,
            seed: r.scenario.seed,
            found: r.outcome.found,
            search_time: r.outcome.search_time,
            iterations: r.outcome.iterations,
            report_time: r.outcome.report_time,
            decision_time: r.outcome.decision_time,
        })
        .collect();

    let stats: Vec<PlannerStats> = planners
        .iter()
        .map(|&p| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.planner == p).collect();
            let found: Vec<&&RunRecord> = mine.iter().filter(|r| r.found).collect();
            let times: Vec<f64> = found.iter().map(|r| r.search_time).collect();
            let iters: Vec<f64> = found.iter().map(|r| r.iterations as f64).collect();
            let decisions: Vec<f64> = found.iter().map(|r| r.decision_time.as_secs_f64()).collect();
            PlannerStats {
                planner: p,
                runs: mine.len(),
                found: found.len(),
                find_rate: if mine.is_empty() { 0.0 } else { found.len() as f64 / mine.len() as f64 },
                search_time: Summary::of(&times),
                iterations: Summary::of(&iters),
                decision_time: Summary::of(&decisions),
            }
        })
        .collect();

    let mean_time = |kind| {
        stats.iter().find(|s| s.planner == kind).and_then(|s| s.search_time).map(|s| s.mean)
    };
    let speedup = match (mean_time(PlannerKind::LawnMower), mean_time(PlannerKind::WeightBased)) {
        (Some(l), Some(w)) if w > 0.0 => Some(l / w),
        _ => None,
    };
    AggregateReport { planners: stats, speedup, runs: records }
}

pub fn run_montecarlo(cfg: &BatchConfig) -> Result<AggregateReport, BenchError> {
    Ok(aggregate(&run_batch(cfg)?, &cfg.planners))
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
}

impl AggregateReport {
    pub fn stats(&self, planner: PlannerKind) -> Option<&PlannerStats> {
        self.planners.iter().find(|s| s.planner == planner)
    }

    /// Aligned plain-text summary. Wall-clock planning times are included
    /// only on request since they vary between executions.
    pub fn render_table(&self, include_timing: bool) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{:<14}{:>6}{:>7}{:>10}{:>12}{:>12}{:>10}{:>12}{:>12}{:>10}",
            "planner", "runs", "found", "find-rate", "mean-T(s)", "median-T(s)", "sd-T(s)", "mean-iter", "median-iter", "sd-iter"
        );
        if include_timing {
            let _ = write!(out, "{:>15}{:>16}", "mean-dec(ms)", "median-dec(ms)");
        }
        out.push('\n');
        for s in &self.planners {
            let t = s.search_time;
            let it = s.iterations;
            let _ = write!(
                out,
                "{:<14}{:>6}{:>7}{:>10.3}{:>12}{:>12}{:>10}{:>12}{:>12}{:>10}",
                s.planner.name(),
                s.runs,
                s.found,
                s.find_rate,
                opt(t.map(|x| x.mean), 2),
                opt(t.map(|x| x.median), 2),
                opt(t.map(|x| x.stddev), 2),
                opt(it.map(|x| x.mean), 1),
                opt(it.map(|x| x.median), 1),
                opt(it.map(|x| x.stddev), 1),
            );
            if include_timing {
                let d = s.decision_time;
                let _ = write!(out, "{:>15}{:>16}", opt(d.map(|x| x.mean * 1e3), 4), opt(d.map(|x| x.median * 1e3), 4));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "speedup (mean T_L / mean T_W): {}", opt(self.speedup, 3));
        out
    }

    /// One row per (run, planner).
    pub fn runs_csv(&self, include_timing: bool) -> String {
        let mut out = String::from("run,planner,seed,found,search_time,iterations,report_time");
        if include_timing {
            out.push_str(",decision_time_ms");
        }
        out.push('\n');
        for r in &self.runs {
            let _ = write!(
                out,
                "{},{},{},{},{:.6},{},{}",
                r.run,
                r.planner.name(),
                r.seed,
                r.found,
                r.search_time,
                r.iterations,
                r.report_time.map_or_else(String::new, |t| format!("{t:.6}"))
            );
            if include_timing {
                let _ = write!(out, ",{:.6}", r.decision_time.as_secs_f64() * 1e3);
            }
            out.push('\n');
        }
        out
    }

    /// Structured summary (per-planner aggregates and speedup).
    pub fn summary_json(&self, include_timing: bool) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            planners: Vec<PlannerView<'a>>,
            speedup: Option<f64>,
        }
        #[derive(Serialize)]
        struct PlannerView<'a> {
            #[serde(flatten)]
            stats: &'a PlannerStats,
            #[serde(skip_serializing_if = "Option::is_none")]
            decision_time: Option<Summary>,
        }
        let view = View {
            planners: self
                .planners
                .iter()
                .map(|s| PlannerView { stats: s, decision_time: if include_timing { s.decision_time } else { None } })
                .collect(),
            speedup: self.speedup,
        };
        serde_json::to_string_pretty(&view).expect("summary is always serializable") + "\n"
    }
}
