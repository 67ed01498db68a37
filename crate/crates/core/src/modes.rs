//! Global, multimodal and mixed integer-discrete-continuous operation, and the
//! multistart driver shared by all of them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constraints::ConstraintSet;
use crate::error::SolveError;
use crate::linalg::distance;
use crate::solver::{minimize, RunResult, SolverConfig, Status};
use crate::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Local,
    Global,
    Multimodal,
    Mixed,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Local => "local",
            Mode::Global => "global",
            Mode::Multimodal => "multimodal",
            Mode::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "local" => Ok(Mode::Local),
            "global" => Ok(Mode::Global),
            "multimodal" => Ok(Mode::Multimodal),
            "mixed" => Ok(Mode::Mixed),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Next search step from the current step and the distance the minimum moved
/// during the iteration.
///
/// Global and mixed modes shrink the step slowly while it is larger than
/// `d_min / 2`; below that, and in local and multimodal modes, the local rule
/// `0.3 |dx| + 0.091 lambda` applies. A zero step becomes `tol`.
pub fn adapt_step(mode: Mode, lambda: f64, moved: f64, d_min: Option<f64>, tol: f64) -> f64 {
    let local = |l: f64| 0.3 * moved + 0.091 * l;
    let slow = |keep: f64| match d_min {
        Some(d) if lambda <= d / 2.0 => local(lambda),
        _ => moved + keep * lambda,
    };
    let next = match mode {
        Mode::Local | Mode::Multimodal => local(lambda),
        Mode::Global => slow(0.82),
        Mode::Mixed => slow(0.51),
    };
    if next == 0.0 {
        tol
    } else {
        next
    }
}

/// A one-dimensional grid `offset + k * step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub step: f64,
    pub offset: f64,
}

impl Grid {
    pub const INTEGER: Grid = Grid {
        step: 1.0,
        offset: 0.0,
    };

    /// Nearest grid point; ties round away from zero.
    pub fn round(&self, v: f64) -> f64 {
        self.offset + ((v - self.offset) / self.step).round() * self.step
    }
}

/// Per-coordinate discreteness: `None` marks a continuous coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMask(pub Vec<Option<Grid>>);

impl GridMask {
    pub fn integer(n: usize) -> Self {
        Self(vec![Some(Grid::INTEGER); n])
    }

    pub fn continuous(n: usize) -> Self {
        Self(vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn round(&self, x: &[f64]) -> Vec<f64> {
        round_to_grid(x, self)
    }
}

pub fn round_to_grid(x: &[f64], mask: &GridMask) -> Vec<f64> {
    x.iter()
        .zip(&mask.0)
        .map(|(v, g)| g.map_or(*v, |g| g.round(*v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeConfig {
    pub mode: Mode,
    pub starts: usize,
    pub lambda0: f64,
    pub d_min: Option<f64>,
    pub grid: Option<GridMask>,
    /// Optima closer than this are merged; `10 * tol` when `None`.
    pub dedupe_radius: Option<f64>,
    /// Region for generated start points.
    pub bounds: Option<Vec<(f64, f64)>>,
    /// Explicit start points, used instead of generated ones.
    pub start_points: Option<Vec<Vec<f64>>>,
    /// Worker threads; 1 runs the sweep serially.
    pub jobs: usize,
}

impl ModeConfig {
    pub fn local() -> Self {
        Self {
            mode: Mode::Local,
            starts: 1,
            lambda0: 1.0,
            d_min: None,
            grid: None,
            dedupe_radius: None,
            bounds: None,
            start_points: None,
            jobs: 1,
        }
    }

    pub fn global() -> Self {
        Self {
            mode: Mode::Global,
            starts: 50,
            lambda0: 100.0,
            ..Self::local()
        }
    }

    pub fn multimodal() -> Self {
        Self {
            mode: Mode::Multimodal,
            starts: 100,
            lambda0: 0.005,
            ..Self::local()
        }
    }

    pub fn mixed(grid: GridMask) -> Self {
        Self {
            mode: Mode::Mixed,
            starts: 50,
            lambda0: 100.0,
            grid: Some(grid),
            ..Self::local()
        }
    }

    pub fn for_mode(mode: Mode, dim: usize) -> Self {
        match mode {
            Mode::Local => Self::local(),
            Mode::Global => Self::global(),
            Mode::Multimodal => Self::multimodal(),
            Mode::Mixed => Self::mixed(GridMask::integer(dim)),
        }
    }

    /// Solver configuration for one start.
    pub fn solver_config(&self, base: &SolverConfig, x0: Vec<f64>, seed: u64) -> SolverConfig {
        SolverConfig {
            x0: Some(x0),
            seed,
            lambda0: self.lambda0,
            mode: self.mode,
            d_min: self.d_min.or(base.d_min),
            grid: self.grid.clone().or_else(|| base.grid.clone()),
            ..base.clone()
        }
    }
}

/// Seed of start `index` in a sweep with base seed `seed`.
pub fn start_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut scale = inv;
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    inv = out;
    inv
}

/// Start points for a sweep.
///
/// With bounds: a Halton sequence under a seeded random rotation. Without:
/// uniform draws in a box of half-width `lambda0` around `center`.
pub fn start_points(
    count: usize,
    bounds: Option<&[(f64, f64)]>,
    center: &[f64],
    lambda0: f64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let dim = center.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match bounds {
        Some(b) => {
            let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            (0..count)
                .map(|i| {
                    (0..dim)
                        .map(|k| {
                            let base = PRIMES[k % PRIMES.len()] + 2 * (k / PRIMES.len()) as u64 * 59;
                            let u = (radical_inverse(i as u64 + 1, base) + shift[k]).fract();
                            let (lo, hi) = b[k];
                            lo + u * (hi - lo)
                        })
                        .collect()
                })
                .collect()
        }
        None => (0..count)
            .map(|_| {
                center
                    .iter()
                    .map(|c| c + lambda0 * rng.random_range(-1.0..=1.0))
                    .collect()
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub f: f64,
    /// Number of starts that converged to this optimum.
    pub basin_count: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptimaSet {
    /// Distinct optima, best first.
    pub optima: Vec<Optimum>,
    /// Per-start outcomes in start order.
    pub runs: Vec<Result<RunResult, SolveError>>,
    pub diagnostic: Option<String>,
}

impl OptimaSet {
    pub fn best(&self) -> Option<&Optimum> {
        self.optima.first()
    }

    pub fn len(&self) -> usize {
        self.optima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.optima.is_empty()
    }
}

/// Merge run results into distinct optima.
///
/// Results are sorted by value and then coordinates before the greedy merge,
/// so the outcome does not depend on the order runs finished in.
pub fn cluster(results: &[RunResult], radius: f64) -> Vec<Optimum> {
    let mut sorted: Vec<&RunResult> = results.iter().filter(|r| r.f_min.is_finite()).collect();
    sorted.sort_by(|a, b| {
        a.f_min.total_cmp(&b.f_min).then_with(|| {
            a.x_min
                .iter()
                .zip(&b.x_min)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut optima: Vec<Optimum> = Vec::new();
    for r in sorted {
        match optima
            .iter_mut()
            .find(|o| distance(&o.x, &r.x_min) <= radius)
        {
            Some(o) => o.basin_count += 1,
            None => optima.push(Optimum {
                x: r.x_min.clone(),
                f: r.f_min,
                basin_count: 1,
            }),
        }
    }
    optima
}

/// Run the solver from many start points and collect distinct optima.
///
/// Global and mixed modes keep only the best optimum. Failed starts are
/// recorded in `runs` and never abort the sweep.
pub fn multistart(
    objective: &dyn Objective,
    constraints: &ConstraintSet,
    dim: usize,
    base: &SolverConfig,
    mode: &ModeConfig,
) -> OptimaSet {
    let starts: Vec<Vec<f64>> = match &mode.start_points {
        Some(list) => list.clone(),
        None => {
            let center = base.x0.clone().unwrap_or_else(|| vec![0.9; dim]);
            let bounds = mode.bounds.as_deref().or(constraints.bounds.as_deref());
            start_points(mode.starts, bounds, &center, mode.lambda0, base.seed)
        }
    };
    let run = |(i, x0): (usize, &Vec<f64>)| {
        let cfg = mode.solver_config(base, x0.clone(), start_seed(base.seed, i));
        minimize(objective, constraints, dim, &cfg)
    };
    let runs: Vec<Result<RunResult, SolveError>> = if mode.jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(mode.jobs).build() {
            Ok(pool) => pool.install(|| starts.par_iter().enumerate().map(run).collect()),
            Err(_) => starts.iter().enumerate().map(run).collect(),
        }
    } else {
        starts.iter().enumerate().map(run).collect()
    };

    let ok: Vec<RunResult> = runs
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.status != Status::NoFeasibleStart)
        .cloned()
        .collect();
    let radius = mode.dedupe_radius.unwrap_or(10.0 * base.tol);
    let mut optima = cluster(&ok, radius);
    if matches!(mode.mode, Mode::Global | Mode::Mixed) {
        optima.truncate(1);
    }
    let diagnostic = ok.is_empty().then(|| {
        format!(
            "none of {} starts produced a result ({} errors)",
            runs.len(),
            runs.iter().filter(|r| r.is_err()).count()
        )
    });
    OptimaSet {
        optima,
        runs,
        diagnostic,
    }
}
