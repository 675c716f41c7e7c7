//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use survivor_search::bench::{self, montecarlo::Summary, AggregateReport};
use survivor_search::grid_env::{make_environment, Environment, GridIndex};
use survivor_search::planners::{lawnmower_plan, PlannerKind};
use survivor_search::weight_core::{base_weights, build_weight_map, prioritize, Quadrant, SurvivorReport, WeightMap};

const HEADINGS: [i32; 8] = [0, 45, 90, 135, 180, 225, 270, 315];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// (weight desc, ring, deviation, row-major index, cell)
type OracleEntry = (std::cmp::Reverse<u128>, i64, u64, usize, (i64, i64));

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

/// Base weights from the expanded polynomials in 128-bit arithmetic:
/// w2 = w4 n^2 + n^2 + n, w3 = w4 n + n, w1 = n w2 + n, w5 = n w1 + 1.
fn oracle_weights(n: u128, w4: u128) -> [u128; 5] {
    let w3 = w4 * n + n;
    let w2 = w4 * n * n + n * n + n;
    let w1 = n * w2 + n;
    [w1, w2, w3, w4, n * w1 + 1]
}

/// Heading multiples of 45 degrees as integer direction vectors.
fn heading_vector(deg: i32) -> (i64, i64) {
    match deg.rem_euclid(360) {
        0 => (1, 0),
        45 => (1, 1),
        90 => (0, 1),
        135 => (-1, 1),
        180 => (-1, 0),
        225 => (-1, -1),
        270 => (0, -1),
        315 => (1, -1),
        other => panic!("heading {other} is not a multiple of 45"),
    }
}

/// Exact sector test in integers: `u` is the (scaled) component along the
/// heading, `v` the component to its left.
fn oracle_quadrant(dx: i64, dy: i64, h: (i64, i64)) -> Quadrant {
    if dx == 0 && dy == 0 {
        return Quadrant::SurvivorCell;
    }
    let u = dx * h.0 + dy * h.1;
    let v = dy * h.0 - dx * h.1;
    if u >= v.abs() {
        Quadrant::Forward
    } else if v > u && v >= -u {
        Quadrant::Left
    } else if v < -u && v <= u {
        Quadrant::Right
    } else {
        Quadrant::Rear
    }
}

fn oracle_weight_index(q: Quadrant) -> usize {
    match q {
        Quadrant::Forward => 0,
        Quadrant::Left => 1,
        Quadrant::Right => 2,
        Quadrant::Rear => 3,
        Quadrant::SurvivorCell => 4,
    }
}

/// Full brute-force plan: own horizon, own weights, own deviation, then a
/// selection sort on (weight desc, ring asc, deviation asc, row-major asc).
fn oracle_plan(cols: usize, rows: usize, s: (usize, usize), heading: i32) -> Vec<GridIndex> {
    let h = heading_vector(heading);
    let cells: Vec<(i64, i64)> = (0..rows).flat_map(|r| (0..cols).map(move |c| (c as i64, r as i64))).collect();
    let (sc, sr) = (s.0 as i64, s.1 as i64);
    let ring = |c: i64, r: i64| (c - sc).abs().max((r - sr).abs());
    let n = cells.iter().map(|&(c, r)| ring(c, r)).max().unwrap().max(1);
    let w = oracle_weights(n as u128, 1);
    let hn = ((h.0 * h.0 + h.1 * h.1) as f64).sqrt();

    let mut keyed: Vec<OracleEntry> = cells
        .iter()
        .enumerate()
        .map(|(lin, &(c, r))| {
            let (dx, dy) = (c - sc, r - sr);
            let q = oracle_quadrant(dx, dy, h);
            let d = ring(c, r);
            let weight = if q == Quadrant::SurvivorCell {
                w[4]
            } else {
                (n - d + 1) as u128 * w[oracle_weight_index(q)]
            };
            let dev = if q == Quadrant::SurvivorCell {
                0
            } else {
                let along = (dx * h.0 + dy * h.1) as f64 / hn;
                let across = ((dy * h.0 - dx * h.1) as f64 / hn).abs();
                (across.atan2(along).to_degrees() * 1e6).round() as u64
            };
            (std::cmp::Reverse(weight), d, dev, lin, (c, r))
        })
        .collect();

    let mut out = Vec::with_capacity(keyed.len());
    while !keyed.is_empty() {
        let mut best = 0;
        for i in 1..keyed.len() {
            let a = &keyed[i];
            let b = &keyed[best];
            if (a.0, a.1, a.2, a.3) < (b.0, b.1, b.2, b.3) {
                best = i;
            }
        }
        let (_, _, _, _, (c, r)) = keyed.swap_remove(best);
        out.push(GridIndex::new(c as usize, r as usize));
    }
    out
}

fn unit_env(cols: usize, rows: usize) -> Environment {
    make_environment(cols as f64, rows as f64, 1.0).unwrap()
}

fn map_for(env: &Environment, s: GridIndex, heading: f64) -> WeightMap {
    let report = SurvivorReport::new(env.cell_center(s).unwrap(), heading, 0.0);
    build_weight_map(env, &report).unwrap()
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

fn weight_equation_invariants() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in 1u64..=200 {
        for w4 in 1u64..=10 {
            let w = base_weights(n, w4).map_err(|e| e.to_string())?;
            let ctx = || format!("n={n} w4={w4}: {w:?}");
            check(w.w5 > w.w1 && w.w1 > w.w2 && w.w2 > w.w3 && w.w3 > w.w4, || format!("chain broken, {}", ctx()))?;
            check((w.w1 - n) % n == 0 && (w.w1 - n - n * n) % (n * n) == 0, || format!("inexact division, {}", ctx()))?;
            check(w.w1 > n * w.w2 && w.w2 > n * w.w3 && w.w3 > n * w.w4, || format!("ranges overlap, {}", ctx()))?;
            check(w.w5 == n * w.w1 + 1, || format!("w5 != n*w1 + 1, {}", ctx()))?;
            let o = oracle_weights(n as u128, w4 as u128);
            check(
                [w.w1, w.w2, w.w3, w.w4, w.w5].iter().map(|&x| x as u128).eq(o),
                || format!("expanded polynomials disagree, {}", ctx()),
            )?;
            cases += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{cases} (n, w4) pairs in {:.1?}", start.elapsed()))
}

fn hand_oracle_spot_values() -> Outcome {
    let expect = [(1, (4, 3, 2, 1, 5)), (2, (22, 10, 4, 1, 45)), (20, (16420, 820, 40, 1, 328401))];
    for (n, e) in expect {
        let w = base_weights(n, 1).map_err(|e| e.to_string())?;
        let got = (w.w1, w.w2, w.w3, w.w4, w.w5);
        check(got == e, || format!("n={n}: got {got:?}, expected {e:?}"))?;
    }
    Ok("n = 1, 2, 20 exact".into())
}

fn prioritization_oracle() -> Outcome {
    let start = Instant::now();
    let mut plans = 0;
    for cols in 1..=10 {
        for rows in 1..=10 {
            let env = unit_env(cols, rows);
            for s in env.cells() {
                for heading in HEADINGS {
                    let plan = prioritize(&map_for(&env, s, heading as f64));
                    let unique: HashSet<_> = plan.waypoints().iter().collect();
                    check(plan.len() == cols * rows && unique.len() == plan.len(), || {
                        format!("{cols}x{rows} survivor {s} heading {heading}: not a permutation")
                    })?;
                    let expect = oracle_plan(cols, rows, (s.col, s.row), heading);
                    check(plan.waypoints() == expect.as_slice(), || {
                        format!("{cols}x{rows} survivor {s} heading {heading}: order differs from oracle")
                    })?;
                    plans += 1;
                }
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{plans} plans match the brute-force oracle in {:.1?}", start.elapsed()))
}

fn lawnmower_coverage() -> Outcome {
    let mut plans = 0;
    for cols in 1..=20 {
        for rows in 1..=20 {
            let env = unit_env(cols, rows);
            for corner in env.corners() {
                let plan = lawnmower_plan(&env, corner).map_err(|e| e.to_string())?;
                let unique: HashSet<_> = plan.waypoints().iter().collect();
                check(plan.len() == cols * rows && unique.len() == cols * rows, || {
                    format!("{cols}x{rows} from {corner}: cells missed or repeated")
                })?;
                check(plan.waypoints().windows(2).all(|w| w[0].is_four_neighbor(&w[1])), || {
                    format!("{cols}x{rows} from {corner}: non-unit step")
                })?;
                plans += 1;
            }
        }
    }
    Ok(format!("{plans} sweeps cover their grid with unit steps"))
}

fn median_times(rep: &AggregateReport) -> Result<(f64, f64), String> {
    let med = |p: PlannerKind| -> Result<Summary, String> {
        rep.stats(p).and_then(|s| s.search_time).ok_or_else(|| format!("{p}: no run found the survivor"))
    };
    Ok((med(PlannerKind::LawnMower)?.median, med(PlannerKind::WeightBased)?.median))
}

fn table_two_reproduction() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for preset in ["ros18", "ros20"] {
        let mut ratios = Vec::new();
        for speed in [0.6, 0.3] {
            let mut cfg = bench::preset(preset).map_err(|e| e.to_string())?;
            cfg.runs = 50;
            cfg.base.survivor.speed = speed;
            let rep = bench::run_montecarlo(&cfg).map_err(|e| e.to_string())?;
            let (tl, tw) = median_times(&rep)?;
            let ratio = tw / tl;
            check(ratio <= 0.5, || format!("{preset} Vs={speed}: median T_W/T_L = {ratio:.3} > 0.5"))?;
            lines.push(format!("{preset}@{speed}: {tw:.1}/{tl:.1}={ratio:.3}"));
            ratios.push(ratio);
        }
        check(ratios[1] < ratios[0], || {
            format!("{preset}: ratio at 0.3 m/s ({:.3}) not below 0.6 m/s ({:.3})", ratios[1], ratios[0])
        })?;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(lines.join(", "))
}

fn monte_carlo_trend() -> Outcome {
    let start = Instant::now();
    let mut cfg = bench::preset("table1").map_err(|e| e.to_string())?;
    cfg.runs = 100;
    let env = cfg.base.environment().map_err(|e| e.to_string())?;
    let b = &cfg.base;
    check(
        b.width == 600.0
            && b.height == 600.0
            && (env.cell_size() - 18.0).abs() < 1e-9
            && b.survivor.speed == 0.6
            && b.uav.max_speed == 12.0
            && b.uav.flight_time == 1800.0
            && matches!(b.observers, survivor_search::sim_engine::ObserverLayout::Random { count: 30, radius } if radius == 30.0)
            && cfg.randomize.observers,
        || "table1 preset does not match the required parameters".to_string(),
    )?;
    let rep = bench::run_montecarlo(&cfg).map_err(|e| e.to_string())?;
    let lm = rep.stats(PlannerKind::LawnMower).ok_or("missing lawn-mower stats")?;
    let wb = rep.stats(PlannerKind::WeightBased).ok_or("missing weight-based stats")?;
    let it = |s: &survivor_search::bench::PlannerStats| s.iterations.map(|x| x.mean).unwrap_or(f64::INFINITY);
    check(it(wb) < it(lm), || format!("mean iterations WB {:.1} not below LM {:.1}", it(wb), it(lm)))?;
    check(wb.find_rate >= lm.find_rate, || {
        format!("find rate WB {:.2} below LM {:.2}", wb.find_rate, lm.find_rate)
    })?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "mean iterations WB {:.1} < LM {:.1}; find rate WB {:.2} >= LM {:.2}",
        it(wb),
        it(lm),
        wb.find_rate,
        lm.find_rate
    ))
}

fn run_cli_mc(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_sarsim"))
        .args(["mc", "--preset", "ros20", "--runs", "12", "--seed", "99", "--parallel", "4"])
        .arg("--out")
        .arg(dir.join("runs.csv"))
        .arg("--summary")
        .arg(dir.join("summary.json"))
        .arg("--trajectory-dir")
        .arg(dir.join("traj"))
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || format!("sarsim mc failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    let mut files = vec![("stdout".to_string(), out.stdout)];
    let mut paths: Vec<_> = std::fs::read_dir(dir.join("traj"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths.insert(0, dir.join("runs.csv"));
    paths.insert(1, dir.join("summary.json"));
    for p in paths {
        let name = p.strip_prefix(dir).unwrap().display().to_string();
        files.push((name, std::fs::read(&p).map_err(|e| e.to_string())?));
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = run_cli_mc(&tmp.path().join("a"))?;
    let b = run_cli_mc(&tmp.path().join("b"))?;
    check(a.len() == b.len(), || "different number of output files".into())?;
    for ((na, ba), (nb, bb)) in a.iter().zip(&b) {
        check(na == nb && ba == bb, || format!("{na} differs between executions"))?;
    }
    check(a.len() == 3 + 24, || format!("expected 27 outputs, got {}", a.len()))?;
    Ok(format!("{} outputs byte-identical across two executions", a.len()))
}

fn gradient_property() -> Outcome {
    let mut maps = 0;
    let headings: Vec<f64> = HEADINGS.iter().map(|&h| h as f64).chain([10.0, 77.7, 200.5, 333.3]).collect();
    for cols in 1..=12 {
        for rows in 1..=12 {
            let env = unit_env(cols, rows);
            for s in env.cells() {
                for &heading in &headings {
                    let map = map_for(&env, s, heading);
                    let ctx = || format!("{cols}x{rows} survivor {s} heading {heading}");
                    let top = map.weight(s);
                    check(env.cells().filter(|&c| c != s).all(|c| map.weight(c) < top), || {
                        format!("{}: survivor cell is not the unique maximum", ctx())
                    })?;
                    // per sector: weight as a function of ring must be non-increasing
                    for q in Quadrant::SECTORS {
                        let mut by_ring: Vec<(usize, u64)> = env
                            .cells()
                            .filter(|&c| map.quadrant(c) == q)
                            .map(|c| (c.chebyshev(&s), map.weight(c)))
                            .collect();
                        by_ring.sort();
                        check(by_ring.windows(2).all(|w| w[0].0 == w[1].0 || w[0].1 >= w[1].1), || {
                            format!("{}: {q:?} weight grows with distance", ctx())
                        })?;
                    }
                    let span = |q: Quadrant| {
                        let ws: Vec<u64> = env.cells().filter(|&c| map.quadrant(c) == q).map(|c| map.weight(c)).collect();
                        (ws.iter().min().copied(), ws.iter().max().copied())
                    };
                    let spans: Vec<_> = Quadrant::SECTORS.iter().map(|&q| (q, span(q))).collect();
                    for (i, (qa, (min_a, _))) in spans.iter().enumerate() {
                        for (qb, (_, max_b)) in &spans[i + 1..] {
                            if let (Some(lo), Some(hi)) = (min_a, max_b) {
                                check(lo > hi, || format!("{}: min {qa:?} {lo} <= max {qb:?} {hi}", ctx()))?;
                            }
                        }
                    }
                    maps += 1;
                }
            }
        }
    }
    Ok(format!("{maps} maps"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("weight-equation invariants", weight_equation_invariants),
        ("hand-oracle spot values", hand_oracle_spot_values),
        ("prioritization oracle", prioritization_oracle),
        ("lawn-mower coverage", lawnmower_coverage),
        ("search-time table reproduction", table_two_reproduction),
        ("Monte-Carlo trend", monte_carlo_trend),
        ("determinism", determinism),
        ("weight-map gradient", gradient_property),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("[PASS] AC{} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] AC{} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
