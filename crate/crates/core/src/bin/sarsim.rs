use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use survivor_search::bench::{self, BatchConfig, BenchError};
use survivor_search::grid_env::WorldPoint;
use survivor_search::planners::{weight_based_plan, PlannerKind};
use survivor_search::sim_engine::{self, SimPhase};
use survivor_search::weight_core::{build_weight_map, SurvivorReport};

#[derive(Parser)]
#[command(name = "sarsim", version, about = "Weight-based UAV survivor search simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario file (flat TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: ros20, ros18, phys10, table1.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Reported survivor x (m); defaults to the scenario's survivor start.
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    /// Reported heading (degrees CCW from +x).
    #[arg(long, allow_negative_numbers = true)]
    heading: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single simulation and print its outcome.
    Sim {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        planner: Option<PlannerKind>,
        /// Survivor speed override (m/s).
        #[arg(long)]
        speed: Option<f64>,
        /// Write the trajectory CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired Monte-Carlo comparison of planners.
    Mc {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        runs: Option<usize>,
        /// Master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Survivor speed override (m/s).
        #[arg(long)]
        speed: Option<f64>,
        /// Worker threads.
        #[arg(long)]
        parallel: Option<usize>,
        /// Write the per-run table (CSV) here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the structured summary (JSON) here.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Write one trajectory CSV per run and planner into this directory.
        #[arg(long)]
        trajectory_dir: Option<PathBuf>,
        /// Include wall-clock planning times (not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Dump the weight map for a survivor report.
    Weights {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        report: ReportArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the weight-based waypoint order for a survivor report.
    Plan {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        report: ReportArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Malformed input; exits with status 2 like a usage error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn load(source: &Source) -> Result<BatchConfig> {
    let loaded = match (&source.config, &source.preset) {
        (Some(path), _) => bench::load_config(path),
        (None, Some(name)) => bench::preset(name),
        (None, None) => return Err(UsageError("one of --config or --preset is required".into()).into()),
    };
    loaded.map_err(|e| match e {
        BenchError::Config(msg) => UsageError(msg).into(),
        other => anyhow::Error::new(other),
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_for(cfg: &BatchConfig, args: &ReportArgs) -> SurvivorReport {
    let s = &cfg.base.survivor;
    SurvivorReport::new(
        WorldPoint::new(args.x.unwrap_or(s.start.x), args.y.unwrap_or(s.start.y)),
        args.heading.unwrap_or(s.heading),
        0.0,
    )
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sim { source, seed, planner, speed, out } => {
            let mut cfg = load(&source)?.base;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(p) = planner {
                cfg.planner = p;
            }
            if let Some(v) = speed {
                cfg.survivor.speed = v;
            }
            cfg.record_trajectory = out.is_some();
            let outcome = sim_engine::run(&cfg).map_err(|e| match e {
                sim_engine::SimError::Config(msg) => anyhow::Error::new(UsageError(msg)),
                other => anyhow::Error::new(other),
            })?;
            println!("planner:       {}", cfg.planner);
            println!("seed:          {}", cfg.seed);
            println!("found:         {}", outcome.found);
            println!("search_time:   {:.3} s", outcome.search_time);
            println!("iterations:    {}", outcome.iterations);
            match outcome.report_time {
                Some(t) => println!("report_time:   {t:.3} s"),
                None => println!("report_time:   -"),
            }
            println!("termination:   {:?}", outcome.termination);
            let phases: Vec<String> = outcome.phase_log.iter().map(|(t, p)| format!("{}@{t:.1}", p.name())).collect();
            println!("phases:        {}", phases.join(" -> "));
            if let Some((t, _)) = outcome.phase_log.iter().find(|(_, p)| *p == SimPhase::Returning) {
                println!("return_leg:    {:.3} s", outcome.total_steps as f64 * cfg.dt - t);
            }
            if let Some(path) = out {
                bench::export_trajectory(&outcome, &path)?;
            }
        }
        Command::Mc { source, runs, seed, speed, parallel, out, summary, trajectory_dir, timing } => {
            let mut cfg = load(&source)?;
            if let Some(r) = runs {
                cfg.runs = r;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(v) = speed {
                cfg.base.survivor.speed = v;
            }
            if let Some(p) = parallel {
                cfg.parallelism = p;
            }
            cfg.validate().map_err(|e| UsageError(e.to_string()))?;
            cfg.record_trajectories = trajectory_dir.is_some();
            let runs = bench::run_batch(&cfg)?;
            if let Some(dir) = &trajectory_dir {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for r in &runs {
                    let path = dir.join(format!("run{:04}_{}.csv", r.run, r.planner.name()));
                    bench::export_trajectory(&r.outcome, &path)?;
                }
            }
            let report = bench::montecarlo::aggregate(&runs, &cfg.planners);
            print!("{}", report.render_table(timing));
            if let Some(path) = out {
                write_out(Some(&path), &report.runs_csv(timing))?;
            }
            if let Some(path) = summary {
                write_out(Some(&path), &report.summary_json(timing))?;
            }
        }
        Command::Weights { source, report, out } => {
            let cfg = load(&source)?;
            let env = cfg.base.environment()?;
            let map = build_weight_map(&env, &report_for(&cfg, &report))?;
            match out {
                Some(path) => bench::export_weight_map(&map, &path)?,
                None => bench::write_weight_map(&map, std::io::stdout().lock())?,
            }
        }
        Command::Plan { source, report, out } => {
            let cfg = load(&source)?;
            let env = cfg.base.environment()?;
            let plan = weight_based_plan(&env, &report_for(&cfg, &report))?;
            let text: String = plan.waypoints().iter().map(|g| format!("{} {}\n", g.col, g.row)).collect();
            write_out(out.as_deref(), &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
