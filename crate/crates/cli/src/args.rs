use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "cdos", version, about = "Derivative-free optimizer and benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem, or sweep it in a multistart mode.
    Solve(SolveArgs),
    /// Run benchmark problems over their start lists.
    Bench(BenchArgs),
    /// List the built-in problems.
    List,
    /// Serve a built-in problem over the black-box line protocol on
    /// stdin/stdout.
    Serve {
        problem: String,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Initial step; 1, or the mode's default in multistart modes.
    #[arg(long)]
    pub step: Option<f64>,
    /// Tolerance on the step and the extremum location.
    #[arg(long = "tol-x", default_value_t = 1e-6)]
    pub tol_x: f64,
    /// Tolerance on the per-iteration decrease of the objective.
    #[arg(long = "tol-f", default_value_t = 1e-6)]
    pub tol_f: f64,
    #[arg(long = "n-exit", default_value_t = 2)]
    pub n_exit: usize,
    #[arg(long = "max-evals", default_value_t = 1_000_000)]
    pub max_evals: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Built-in problem name.
    #[arg(conflicts_with = "problem_flag")]
    pub problem: Option<String>,
    #[arg(long = "problem")]
    pub problem_flag: Option<String>,
    /// Initial point, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub x0: Option<Vec<f64>>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "local")]
    pub mode: String,
    /// Number of multistart runs; defaults per mode.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Start region as `lo,hi`, once per dimension or once for all.
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Vec<String>,
    /// Minimum spacing between neighbouring optima.
    #[arg(long = "d-min")]
    pub d_min: Option<f64>,
    /// Grid spacing of the discrete coordinates in mixed mode.
    #[arg(long, default_value_t = 1.0)]
    pub grid: f64,
    /// Write every trial point as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// External objective program speaking the line protocol.
    #[arg(long, requires = "dim", conflicts_with_all = ["problem", "problem_flag"])]
    pub blackbox: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Seconds to wait for each black-box reply.
    #[arg(long, default_value_t = 30.0)]
    pub timeout: f64,
}

impl SolveArgs {
    pub fn problem_name(&self) -> Option<&str> {
        self.problem.as_deref().or(self.problem_flag.as_deref())
    }
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Problems to run; every benchmark problem when empty.
    pub problems: Vec<String>,
    #[arg(long = "problem")]
    pub problem_flag: Vec<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Per-start CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_bounds(specs: &[String], dim: usize) -> Result<Option<Vec<(f64, f64)>>, String> {
    if specs.is_empty() {
        return Ok(None);
    }
    let parsed = specs
        .iter()
        .map(|s| {
            let parts: Vec<&str> = s.split(',').collect();
            match parts.as_slice() {
                [lo, hi] => {
                    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad bound {s:?}"))?;
                    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad bound {s:?}"))?;
                    if lo < hi {
                        Ok((lo, hi))
                    } else {
                        Err(format!("empty bound {s:?}"))
                    }
                }
                _ => Err(format!("bounds take lo,hi, got {s:?}")),
            }
        })
        .collect::<Result<Vec<_>, String>>()?;
    match parsed.len() {
        1 => Ok(Some(vec![parsed[0]; dim])),
        n if n == dim => Ok(Some(parsed)),
        n => Err(format!("{n} bounds given for {dim} dimensions")),
    }
}
