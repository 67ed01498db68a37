//! Benchmark sweeps over a problem's start list.

use std::io::{Read, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use cdos::modes::start_seed;
use cdos::problems::{format_f64, Problem};
use cdos::{is_feasible, minimize, EvalError, Objective, SolverConfig};
use rayon::prelude::*;

/// One start of a sweep. Failed starts keep `f_min` and `err` as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub problem: String,
    pub start_index: usize,
    pub x0: Vec<f64>,
    pub f_min: f64,
    pub err: f64,
    pub evals: u64,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub problem: String,
    pub method: &'static str,
    pub starts: usize,
    pub avg_evals: f64,
    pub median_err: f64,
    /// Percentage of starts within the fail threshold.
    pub reliability: f64,
}

impl Summary {
    pub fn from_rows(problem: &str, rows: &[BenchRow], fail_threshold: f64) -> Self {
        let n = rows.len();
        let mut errs: Vec<f64> = rows.iter().map(|r| r.err).collect();
        errs.sort_by(f64::total_cmp);
        let median_err = match n {
            0 => f64::NAN,
            _ if n % 2 == 1 => errs[n / 2],
            _ => 0.5 * (errs[n / 2 - 1] + errs[n / 2]),
        };
        let ok = rows.iter().filter(|r| r.err <= fail_threshold).count();
        Self {
            problem: problem.to_string(),
            method: "CDOS",
            starts: n,
            avg_evals: rows.iter().map(|r| r.evals as f64).sum::<f64>() / n.max(1) as f64,
            median_err,
            reliability: 100.0 * ok as f64 / n.max(1) as f64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Summary,
    /// Objective evaluations at points violating an inequality constraint.
    pub infeasible_evals: u64,
    pub wall: Duration,
}

/// Counts evaluations at infeasible points.
struct Audited<'a> {
    problem: &'a Problem,
    infeasible: &'a AtomicU64,
}

impl Objective for Audited<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        if !matches!(is_feasible(&self.problem.constraints, x), Ok(true)) {
            self.infeasible.fetch_add(1, Ordering::Relaxed);
        }
        self.problem.objective.eval(x)
    }
}

fn run_start(p: &Problem, base: &SolverConfig, i: usize, x0: &[f64], infeasible: &AtomicU64) -> BenchRow {
    let cfg = SolverConfig {
        x0: Some(x0.to_vec()),
        seed: start_seed(base.seed, i),
        ..base.clone()
    };
    let audited = Audited {
        problem: p,
        infeasible,
    };
    let objective: &dyn Objective = if p.constraints.has_inequalities() {
        &audited
    } else {
        p.objective.as_ref()
    };
    let (f_min, evals, status) = match minimize(objective, &p.constraints, p.dim, &cfg) {
        Ok(r) => (r.f_min, r.evals, r.status.as_str().to_string()),
        Err(_) => (f64::NAN, 0, "error".to_string()),
    };
    BenchRow {
        problem: p.name.to_string(),
        start_index: i,
        x0: x0.to_vec(),
        f_min,
        err: p.error(f_min).unwrap_or(f64::NAN),
        evals,
        status,
    }
}

/// Solve `p` from every entry of its start list.
///
/// Each start gets a seed derived from `base.seed` and its index, so the rows
/// do not depend on `jobs`.
pub fn run_bench(p: &Problem, base: &SolverConfig, jobs: usize) -> BenchReport {
    let starts = p.start_list.clone().unwrap_or_default();
    let infeasible = AtomicU64::new(0);
    let t0 = Instant::now();
    let run = |(i, x0): (usize, &Vec<f64>)| run_start(p, base, i, x0, &infeasible);
    let rows: Vec<BenchRow> = if jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| starts.par_iter().enumerate().map(run).collect()),
            Err(_) => starts.iter().enumerate().map(run).collect(),
        }
    } else {
        starts.iter().enumerate().map(run).collect()
    };
    let wall = t0.elapsed();
    let summary = Summary::from_rows(p.name, &rows, p.fail_threshold);
    BenchReport {
        rows,
        summary,
        infeasible_evals: infeasible.into_inner(),
        wall,
    }
}

fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["problem".to_string(), "start_index".to_string()];
    h.extend((1..=dim).map(|k| format!("x0_{k}")));
    h.extend(["f_min", "err", "evals", "status"].map(String::from));
    h
}

/// Per-start rows as CSV. Rows of problems with different dimensions pad the
/// start coordinates to the widest one.
pub fn write_rows<W: Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let dim = rows.iter().map(|r| r.x0.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(dim))?;
    for r in rows {
        let mut rec = vec![r.problem.clone(), r.start_index.to_string()];
        rec.extend((0..dim).map(|k| r.x0.get(k).map_or(String::new(), |v| format_f64(*v))));
        rec.extend([format_f64(r.f_min), format_f64(r.err), r.evals.to_string(), r.status.clone()]);
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<BenchRow>, String> {
    let mut rd = csv::Reader::from_reader(input);
    let dim = rd.headers().map_err(|e| e.to_string())?.len().saturating_sub(6);
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    rd.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            let x0 = (0..dim)
                .map(|k| &rec[2 + k])
                .filter(|s| !s.is_empty())
                .map(num)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(BenchRow {
                problem: rec[0].to_string(),
                start_index: rec[1].parse().map_err(|_| "bad start_index".to_string())?,
                x0,
                f_min: num(&rec[2 + dim])?,
                err: num(&rec[3 + dim])?,
                evals: rec[4 + dim].parse().map_err(|_| "bad evals".to_string())?,
                status: rec[5 + dim].to_string(),
            })
        })
        .collect()
}

pub fn summary_header() -> String {
    format!(
        "{:<16} {:<6} {:>6} {:>10} {:>12} {:>12} {:>10} {:>9}",
        "problem", "method", "starts", "avg_evals", "median_err", "reliability", "infeasible", "wall_s"
    )
}

pub fn summary_line(r: &BenchReport) -> String {
    let s = &r.summary;
    format!(
        "{:<16} {:<6} {:>6} {:>10.1} {:>12.3e} {:>11.1}% {:>10} {:>9.2}",
        s.problem,
        s.method,
        s.starts,
        s.avg_evals,
        s.median_err,
        s.reliability,
        r.infeasible_evals,
        r.wall.as_secs_f64()
    )
}
