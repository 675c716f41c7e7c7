//! Plain-text exports: trajectory CSV and integer weight-map matrices.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::BenchError;
use crate::sim_engine::{Agent, SimOutcome, SimPhase, TrajectoryRecord};
use crate::weight_core::WeightMap;

pub const TRAJECTORY_HEADER: &str = "t,agent,x,y,z,phase";

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

pub fn write_trajectory<W: Write>(records: &[TrajectoryRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        writeln!(w, "{:.6},{},{:.6},{:.6},{:.6},{}", r.t, r.agent.name(), r.x, r.y, r.z, r.phase.name())?;
    }
    w.flush()
}

pub fn export_trajectory(outcome: &SimOutcome, path: &Path) -> Result<(), BenchError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_trajectory(&outcome.trajectory, BufWriter::new(file)).map_err(io_err(path))
}

fn parse_agent(s: &str) -> Option<Agent> {
    match s {
        "uav" => Some(Agent::Uav),
        "survivor" => Some(Agent::Survivor),
        _ => None,
    }
}

fn parse_phase(s: &str) -> Option<SimPhase> {
    [SimPhase::Sweeping, SimPhase::Transit, SimPhase::WeightedSearch, SimPhase::Returning, SimPhase::Done]
        .into_iter()
        .find(|p| p.name() == s)
}

/// Load a trajectory written by [`export_trajectory`].
pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRecord>, BenchError> {
    let file = File::open(path).map_err(io_err(path))?;
    let bad = |line: usize, what: &str| BenchError::Config(format!("{}:{line}: {what}", path.display()));
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if n == 0 {
            if line != TRAJECTORY_HEADER {
                return Err(bad(1, "unexpected header"));
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(n + 1, "expected 6 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(n + 1, "bad number"));
        out.push(TrajectoryRecord {
            t: num(f[0])?,
            agent: parse_agent(f[1]).ok_or_else(|| bad(n + 1, "bad agent"))?,
            x: num(f[2])?,
            y: num(f[3])?,
            z: num(f[4])?,
            phase: parse_phase(f[5]).ok_or_else(|| bad(n + 1, "bad phase"))?,
        });
    }
    Ok(out)
}

/// Rows of whitespace-separated integers, lowest `y` row first.
pub fn write_weight_map<W: Write>(map: &WeightMap, mut w: W) -> io::Result<()> {
    for row in map.rows() {
        let line: Vec<String> = row.iter().map(u64::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()
}

pub fn export_weight_map(map: &WeightMap, path: &Path) -> Result<(), BenchError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_weight_map(map, BufWriter::new(file)).map_err(io_err(path))
}
