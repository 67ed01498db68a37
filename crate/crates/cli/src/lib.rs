//! Command implementations behind the `cdos` binary.

use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::sync::Arc;
use std::time::Duration;

use cdos::modes::{Grid, GridMask, Mode, ModeConfig};
use cdos::problems::{self, format_f64, BlackBox, BlackBoxSpec};
use cdos::solver::minimize_observed;
use cdos::{is_feasible, multistart, ConstraintSet, EvalError, Objective, SolveError, SolverConfig, Status};
use thiserror::Error;

pub mod args;
pub mod bench;
pub mod trace;

use args::{BenchArgs, SolveArgs, SolverArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solve(String),
    #[error("black-box failure: {0}")]
    Protocol(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solve(_) | CliError::Io(_) => 3,
            CliError::Protocol(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Objective(ref ev) | SolveError::Constraint(ref ev)
                if matches!(
                    ev,
                    EvalError::Protocol { .. } | EvalError::Timeout(_) | EvalError::ProcessExit(_) | EvalError::Io(_)
                ) =>
            {
                CliError::Protocol(e.to_string())
            }
            SolveError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Solve(other.to_string()),
        }
    }
}

/// Solver settings shared by every command, before per-run fields.
pub fn base_config(a: &SolverArgs) -> SolverConfig {
    SolverConfig {
        lambda0: a.step.unwrap_or(1.0),
        tol: a.tol_x,
        tol1: a.tol_x,
        tol2: a.tol_f,
        n_exit: a.n_exit,
        max_evals: a.max_evals,
        seed: a.seed,
        ..SolverConfig::default()
    }
}

fn lookup(name: &str) -> Result<problems::Problem, CliError> {
    problems::by_name(name).ok_or_else(|| CliError::Usage(format!("unknown problem {name:?}; see `cdos list`")))
}

fn join(x: &[f64]) -> String {
    x.iter().copied().map(format_f64).collect::<Vec<_>>().join(",")
}

struct Target {
    objective: Arc<dyn Objective>,
    constraints: ConstraintSet,
    dim: usize,
    default_x0: Option<Vec<f64>>,
    // keeps the child process alive for the run
    _blackbox: Option<Arc<BlackBox>>,
}

fn target(a: &SolveArgs) -> Result<Target, CliError> {
    if let Some(cmd) = &a.blackbox {
        let dim = a.dim.ok_or_else(|| CliError::Usage("--blackbox needs --dim".into()))?;
        if dim == 0 || !(a.timeout > 0.0) {
            return Err(CliError::Usage("--dim and --timeout must be positive".into()));
        }
        let spec = BlackBoxSpec {
            command: cmd.clone(),
            timeout: Duration::from_secs_f64(a.timeout),
            dim,
        };
        let (bb, constraints) = problems::blackbox_objective(spec).map_err(|e| CliError::Protocol(e.to_string()))?;
        return Ok(Target {
            objective: bb.clone(),
            constraints,
            dim,
            default_x0: None,
            _blackbox: Some(bb),
        });
    }
    let name = a
        .problem_name()
        .ok_or_else(|| CliError::Usage("name a problem or pass --blackbox".into()))?;
    let p = lookup(name)?;
    Ok(Target {
        objective: p.objective.clone(),
        constraints: p.constraints.clone(),
        dim: p.dim,
        default_x0: p.start_list.as_ref().and_then(|s| s.first().cloned()),
        _blackbox: None,
    })
}

pub fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mode: Mode = a.mode.parse().map_err(CliError::Usage)?;
    let t = target(a)?;
    let x0 = a.x0.clone().or(t.default_x0.clone());
    if let Some(x0) = &x0 {
        if x0.len() != t.dim {
            return Err(CliError::Usage(format!("--x0 has {} coordinates, problem has {}", x0.len(), t.dim)));
        }
    }
    let mut cfg = base_config(&a.solver);
    cfg.x0 = x0;
    cfg.mode = mode;
    cfg.d_min = a.d_min;

    let multi = mode != Mode::Local || a.starts.is_some_and(|s| s > 1);
    if !multi {
        return solve_once(a, &t, &cfg, out);
    }
    if a.trace.is_some() {
        return Err(CliError::Usage("--trace applies to single runs only".into()));
    }
    let mut mc = ModeConfig::for_mode(mode, t.dim);
    if let Some(s) = a.starts {
        mc.starts = s;
    }
    if let Some(step) = a.solver.step {
        mc.lambda0 = step;
    }
    if mode == Mode::Mixed {
        if !(a.grid > 0.0) {
            return Err(CliError::Usage("--grid must be positive".into()));
        }
        mc.grid = Some(GridMask(vec![Some(Grid { step: a.grid, offset: 0.0 }); t.dim]));
    }
    mc.d_min = a.d_min;
    mc.bounds = args::parse_bounds(&a.bounds, t.dim).map_err(CliError::Usage)?;
    mc.jobs = a.solver.jobs;

    let set = multistart(t.objective.as_ref(), &t.constraints, t.dim, &cfg, &mc);
    if let Some(d) = &set.diagnostic {
        return Err(CliError::Solve(d.clone()));
    }
    for r in set.runs.iter().filter_map(|r| r.as_ref().err()) {
        if let e @ CliError::Protocol(_) = CliError::from(r.clone()) {
            return Err(e);
        }
    }
    writeln!(out, "mode: {}", mode.as_str())?;
    writeln!(out, "starts: {}", set.runs.len())?;
    writeln!(out, "optima: {}", set.len())?;
    for o in &set.optima {
        writeln!(out, "x: {}  f: {}  basin: {}", join(&o.x), format_f64(o.f), o.basin_count)?;
    }
    Ok(())
}

fn solve_once(a: &SolveArgs, t: &Target, cfg: &SolverConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let result = match &a.trace {
        Some(path) => {
            let file = BufWriter::new(File::create(path)?);
            let mut tw = trace::TraceWriter::new(file, t.dim)?;
            let r = {
                let mut obs = |tr: &cdos::Trial<'_>| tw.record(tr);
                minimize_observed(t.objective.as_ref(), &t.constraints, t.dim, cfg, &mut obs)
            };
            tw.finish()?;
            r?
        }
        None => cdos::minimize(t.objective.as_ref(), &t.constraints, t.dim, cfg)?,
    };
    writeln!(out, "x_min: {}", join(&result.x_min))?;
    writeln!(out, "f_min: {}", format_f64(result.f_min))?;
    writeln!(out, "evals: {}", result.evals)?;
    writeln!(out, "line_searches: {}", result.line_searches)?;
    writeln!(out, "status: {}", result.status.as_str())?;
    if !t.constraints.h.is_empty() {
        writeln!(out, "max_equality_violation: {}", format_f64(result.max_equality_violation))?;
    }
    if result.status == Status::NoFeasibleStart {
        return Err(CliError::Solve("initial point is infeasible".into()));
    }
    Ok(())
}

/// Run the sweeps, write per-start CSV to `csv_out` and the summary table to
/// `summary_out`.
pub fn cmd_bench(a: &BenchArgs, csv_out: &mut dyn Write, summary_out: &mut dyn Write) -> Result<Vec<bench::BenchReport>, CliError> {
    let mut names: Vec<String> = a.problems.iter().chain(&a.problem_flag).cloned().collect();
    if names.is_empty() {
        names = problems::corpus().iter().map(|p| p.name.to_string()).collect();
    }
    let cfg = base_config(&a.solver);
    let mut reports = Vec::new();
    for name in &names {
        let p = lookup(name)?;
        if p.start_list.is_none() || p.known_fmin.is_none() {
            return Err(CliError::Usage(format!("{name} has no benchmark start list")));
        }
        reports.push(bench::run_bench(&p, &cfg, a.solver.jobs));
    }
    let rows: Vec<bench::BenchRow> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    bench::write_rows(&mut *csv_out, &rows)?;
    writeln!(summary_out, "{}", bench::summary_header())?;
    for r in &reports {
        writeln!(summary_out, "{}", bench::summary_line(r))?;
    }
    Ok(reports)
}

pub fn cmd_list(out: &mut dyn Write) -> Result<(), CliError> {
    for p in problems::all() {
        let fmin = p.known_fmin.map_or("-".to_string(), format_f64);
        let starts = p.start_list.as_ref().map_or(0, Vec::len);
        writeln!(out, "{:<18} dim={} known_fmin={:<6} starts={}", p.name, p.dim, fmin, starts)?;
    }
    Ok(())
}

/// Answer line-protocol requests for a built-in problem until end of input.
pub fn cmd_serve(name: &str, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let p = lookup(name)?;
    for line in input.lines() {
        let line = line?;
        let x: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Protocol(format!("bad request {line:?}")))?;
        if x.len() != p.dim {
            return Err(CliError::Protocol(format!("expected {} coordinates in {line:?}", p.dim)));
        }
        let feasible = is_feasible(&p.constraints, &x).map_err(CliError::from)?;
        if feasible {
            let v = p.objective.eval(&x).map_err(|e| CliError::Solve(e.to_string()))?;
            writeln!(out, "F {}", format_f64(v))?;
        } else {
            writeln!(out, "INFEASIBLE")?;
        }
        out.flush()?;
    }
    Ok(())
}
