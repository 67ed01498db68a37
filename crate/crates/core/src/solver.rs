//! The CDOS iteration.
//!
//! * Stage I probes every coordinate axis once and searches along the
//!   negated increment vector (a quasi-gradient).
//! * Stage II builds the remaining `n - 1` conjugate directions. Each one
//!   joins the current minimum to the minimum found after an orthogonal shift
//!   away from the directions built so far.
//! * Stage III repeats the construction forever on a rotating direction set,
//!   adapting the step after every iteration, and occasionally extrapolates
//!   along a parabola through recent minima to follow curved valleys.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constraints::{
    feasible_shift_point_with, find_feasible_step_with, ConstraintSet, DEFAULT_PENALTY,
};
use crate::error::SolveError;
use crate::eval::{Evaluator, Observer};
use crate::linalg::{
    complement_direction, distance, dot, normalized, orthogonal_shift_direction, sub, unit_axis,
    DirectionSet,
};
use crate::linesearch::line_minimize_in;
use crate::modes::{adapt_step, GridMask, Mode};
use crate::{Objective, Point};

/// Ratio of orthogonal shift to search step.
pub const SHIFT_RATIO: f64 = 0.62;

/// Step multiplier for the re-minimizations after a Stage III shift.
pub const SHIFTED_SEARCH_FACTOR: f64 = 3.0;

/// Points closer than this are treated as the same point when joining them
/// into a new direction.
const COINCIDENT: f64 = 1e-14;

/// A new direction whose component along the shift direction falls below
/// this is considered dependent on the remaining directions.
const MIN_SHIFT_COMPONENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sense {
    #[default]
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Initial step `lambda`.
    pub lambda0: f64,
    /// Initial point; all components 0.9 when `None`.
    pub x0: Option<Vec<f64>>,
    /// Confidence interval for the extremum point; replaces a zero step.
    pub tol: f64,
    /// Exit threshold on the adapted step.
    pub tol1: f64,
    /// Exit threshold on the per-iteration decrease of the objective.
    pub tol2: f64,
    /// Consecutive iterations both exit thresholds must hold.
    pub n_exit: usize,
    pub max_evals: u64,
    /// Step of the curved-direction extrapolation; the current search step
    /// when `None`.
    pub curve_step: Option<f64>,
    pub curve_search: bool,
    pub seed: u64,
    pub sense: Sense,
    pub mode: Mode,
    /// Known minimum spacing between neighbouring optima or grid points.
    pub d_min: Option<f64>,
    /// Discrete coordinates for mixed-integer problems.
    pub grid: Option<GridMask>,
    /// Weight of the quadratic equality penalty.
    pub penalty: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda0: 1.0,
            x0: None,
            tol: 1e-6,
            tol1: 1e-6,
            tol2: 1e-6,
            n_exit: 2,
            max_evals: 1_000_000,
            curve_step: None,
            curve_search: true,
            seed: 0,
            sense: Sense::Minimize,
            mode: Mode::Local,
            d_min: None,
            grid: None,
            penalty: DEFAULT_PENALTY,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, dim: usize) -> Result<(), SolveError> {
        let bad = |msg: &str| Err(SolveError::InvalidConfig(msg.to_string()));
        if dim == 0 {
            return bad("dimension must be at least 1");
        }
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return bad("lambda0 must be positive");
        }
        if !(self.tol > 0.0 && self.tol1 > 0.0 && self.tol2 > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.n_exit == 0 {
            return bad("n_exit must be at least 1");
        }
        if !(self.penalty > 0.0) {
            return bad("penalty weight must be positive");
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != dim {
                return bad("x0 dimension does not match the problem");
            }
            if x0.iter().any(|v| !v.is_finite()) {
                return bad("x0 must be finite");
            }
        }
        if let Some(g) = &self.grid {
            if g.len() != dim {
                return bad("grid mask dimension does not match the problem");
            }
        }
        Ok(())
    }

    fn start_point(&self, dim: usize) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| vec![0.9; dim])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    BudgetExhausted,
    NoFeasibleStart,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::BudgetExhausted => "budget_exhausted",
            Status::NoFeasibleStart => "no_feasible_start",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub x_min: Vec<f64>,
    /// Objective value at `x_min`, in the caller's sense and without penalty.
    pub f_min: f64,
    pub evals: u64,
    pub line_searches: u64,
    pub iterations: u64,
    pub status: Status,
    pub max_equality_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub dirs: DirectionSet,
    pub x_min: Point,
    pub lambda: f64,
    pub lambda_s: f64,
    /// Completed Stage III iterations.
    pub iter: u64,
    pub exit_streak: usize,
    /// Recent iteration minima, newest last, at most `2n + 3` of them.
    pub history: VecDeque<Vec<f64>>,
    pub eval_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Start,
    Directions,
    Main,
}

/// Step-by-step driver of one run.
///
/// [`minimize`] is the usual entry point; the individual stages are exposed
/// for inspection.
pub struct Solver<'a> {
    config: &'a SolverConfig,
    ev: Evaluator<'a>,
    rng: ChaCha8Rng,
    n: usize,
    state: SolverState,
    stage: Stage,
    line_searches: u64,
    /// Minimum before the last Stage II line search, for the first Stage III step.
    before_last: Vec<f64>,
}

impl<'a> Solver<'a> {
    pub fn new(
        objective: &'a dyn Objective,
        constraints: &'a ConstraintSet,
        dim: usize,
        config: &'a SolverConfig,
    ) -> Result<Self, SolveError> {
        config.validate(dim)?;
        let sign = match config.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let ev = Evaluator::new(
            objective,
            constraints,
            sign,
            config.penalty,
            config.grid.as_ref(),
            config.max_evals,
        );
        let x0 = config.start_point(dim);
        Ok(Self {
            config,
            ev,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            n: dim,
            state: SolverState {
                dirs: DirectionSet::coordinate(dim),
                x_min: Point {
                    x: x0.clone(),
                    f: f64::NAN,
                },
                lambda: config.lambda0,
                lambda_s: SHIFT_RATIO * config.lambda0,
                iter: 0,
                exit_streak: 0,
                history: VecDeque::new(),
                eval_count: 0,
            },
            stage: Stage::Start,
            line_searches: 0,
            before_last: x0,
        })
    }

    /// Report every trial point to `observer`.
    pub fn with_observer(mut self, observer: &'a mut Observer<'a>) -> Self {
        self.ev.set_observer(observer);
        self
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn line_searches(&self) -> u64 {
        self.line_searches
    }

    pub fn evals(&self) -> u64 {
        self.ev.evals()
    }

    fn line_search(&mut self, from: &Point, u: &[f64], lambda: f64) -> Result<Point, SolveError> {
        self.line_searches += 1;
        let (best, _) = line_minimize_in(&mut self.ev, from, u, lambda)?;
        self.state.eval_count = self.ev.evals();
        Ok(best)
    }

    fn shift(&mut self, dir: &[f64], lambda_s: f64) -> Result<Point, SolveError> {
        let from = self.state.x_min.clone();
        match feasible_shift_point_with(&mut self.ev, &from.x, dir, lambda_s, &mut self.rng) {
            Ok(y) => self.ev.eval(y),
            Err(SolveError::NoFeasiblePoint(_)) => Ok(from),
            Err(e) => Err(e),
        }
    }

    /// Unit vector joining `x` and `y`, pointing from the worse towards the
    /// better of the two. Falls back to `shift_dir` when the points coincide
    /// or the join has no component outside the retained directions.
    fn join(x: &Point, y: &Point, shift_dir: &[f64]) -> Vec<f64> {
        if distance(&x.x, &y.x) < COINCIDENT {
            return shift_dir.to_vec();
        }
        let d = if x.f < y.f { sub(&x.x, &y.x) } else { sub(&y.x, &x.x) };
        match normalized(&d) {
            Some(u) if dot(&u, shift_dir).abs() >= MIN_SHIFT_COMPONENT => u,
            _ => shift_dir.to_vec(),
        }
    }

    fn shift_direction(&self, retained: &[Vec<f64>], probe: &[f64]) -> Vec<f64> {
        orthogonal_shift_direction(retained, probe)
            .ok()
            .or_else(|| complement_direction(retained, self.n))
            .unwrap_or_else(|| unit_axis(self.n, 0))
    }

    /// Stage I: axis probes, quasi-gradient direction, first line search.
    /// Returns the first search direction.
    pub fn stage1(&mut self) -> Result<Vec<f64>, SolveError> {
        assert_eq!(self.stage, Stage::Start, "stage1 already ran");
        let lambda = self.config.lambda0;
        let x0 = self.config.start_point(self.n);
        let start = match self.ev.try_point(x0)? {
            Some(p) => p,
            None => return Err(SolveError::NoFeasibleStart),
        };

        let mut s = vec![0.0; self.n];
        for (i, si) in s.iter_mut().enumerate() {
            let axis = unit_axis(self.n, i);
            if let Some((step, x)) = find_feasible_step_with(&mut self.ev, &start.x, &axis, lambda)?
            {
                let probe = self.ev.eval(x)?;
                // scale back to a full step along +e_i
                let slope = (probe.f - start.f) / step.lambda;
                *si = if step.reversed { -slope } else { slope } * lambda;
            }
        }
        let u1 = match normalized(&s) {
            Some(g) if s.iter().all(|v| v.is_finite()) && crate::linalg::norm(&s) >= 1e-300 => {
                g.iter().map(|v| -v).collect()
            }
            _ => unit_axis(self.n, 0),
        };

        let x1 = self.line_search(&start, &u1, lambda)?;
        self.state.dirs.set(0, u1.clone());
        self.before_last = start.x.clone();
        self.state.x_min = x1;
        self.stage = Stage::Directions;
        Ok(u1)
    }

    /// Stage II: construct directions `u_2, ..., u_n` with a fixed step.
    pub fn stage2(&mut self) -> Result<(), SolveError> {
        assert_eq!(self.stage, Stage::Directions, "stage2 needs stage1");
        let lambda = self.config.lambda0;
        let lambda_s = SHIFT_RATIO * lambda;
        for i in 1..self.n {
            let built: Vec<Vec<f64>> = self.state.dirs.as_slice()[..i].to_vec();
            let q = self.shift_direction(&built, self.state.dirs.get(i));
            let x = self.state.x_min.clone();
            let mut y = self.shift(&q, lambda_s)?;
            for u in &built {
                let better = self.line_search(&y, u, lambda)?;
                if better.f < y.f {
                    y = better;
                }
            }
            let ui = Self::join(&x, &y, &q);
            let from = if x.f < y.f { x.clone() } else { y };
            let next = self.line_search(&from, &ui, lambda)?;
            self.state.dirs.set(i, ui);
            self.before_last = x.x;
            self.state.x_min = next;
        }

        let step = adapt_step(
            self.config.mode,
            lambda,
            distance(&self.state.x_min.x, &self.before_last),
            self.config.d_min,
            self.config.tol,
        );
        self.state.lambda = step;
        self.state.lambda_s = shift_for(step);
        self.state.history.clear();
        self.state.history.push_back(self.state.x_min.x.clone());
        self.stage = Stage::Main;
        Ok(())
    }

    /// One Stage III iteration. Returns `true` once the exit test has held
    /// `n_exit` times in a row.
    pub fn stage3_iteration(&mut self) -> Result<bool, SolveError> {
        assert_eq!(self.stage, Stage::Main, "stage3 needs stage2");
        let lambda = self.state.lambda;
        let previous = self.state.x_min.clone();

        if self.n == 1 {
            let u = self.state.dirs.get(0).to_vec();
            let next = self.line_search(&previous, &u, lambda)?;
            if next.f < self.state.x_min.f {
                self.state.x_min = next;
            }
        } else {
            // shift away from u_2..u_n, oriented along u_1
            let retained: Vec<Vec<f64>> = self.state.dirs.as_slice()[1..]
                .iter()
                .rev()
                .cloned()
                .collect();
            let mut q = self.shift_direction(&retained, self.state.dirs.get(0));
            let u1 = self.state.dirs.get(0);
            if distance(&q, u1) > q.iter().zip(u1).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt()
            {
                q.iter_mut().for_each(|v| *v = -*v);
            }
            let mut y = self.shift(&q, self.state.lambda_s)?;

            self.state.dirs.rotate_left();
            for j in 0..self.n - 1 {
                let u = self.state.dirs.get(j).to_vec();
                let better = self.line_search(&y, &u, SHIFTED_SEARCH_FACTOR * lambda)?;
                if better.f < y.f {
                    y = better;
                }
            }

            let x = self.state.x_min.clone();
            let un = Self::join(&x, &y, &q);
            let from = if x.f < y.f { x } else { y };
            let next = self.line_search(&from, &un, lambda)?;
            self.state.dirs.set(self.n - 1, un);
            if next.f < self.state.x_min.f {
                self.state.x_min = next;
            }
        }

        self.state.iter += 1;
        let n1 = self.n + 1;
        if self.config.curve_search
            && self.state.history.len() >= 2 * n1
            && self.state.iter % n1 as u64 == 0
        {
            self.curve_search()?;
        }
        self.state.history.push_back(self.state.x_min.x.clone());
        while self.state.history.len() > 2 * self.n + 3 {
            self.state.history.pop_front();
        }

        let moved = distance(&self.state.x_min.x, &previous.x);
        let next = adapt_step(
            self.config.mode,
            lambda,
            moved,
            self.config.d_min,
            self.config.tol,
        );
        self.state.lambda = next;
        self.state.lambda_s = shift_for(next);

        let decrease = previous.f - self.state.x_min.f;
        if next <= self.config.tol1 && decrease <= self.config.tol2 {
            self.state.exit_streak += 1;
        } else {
            self.state.exit_streak = 0;
        }
        self.state.eval_count = self.ev.evals();
        Ok(self.state.exit_streak >= self.config.n_exit)
    }

    /// Extrapolate along the parabola through the minima of iterations
    /// `i`, `i + n + 1` and the current one. Returns whether `x_min` improved.
    pub fn curve_search(&mut self) -> Result<bool, SolveError> {
        let n1 = self.n + 1;
        let h = &self.state.history;
        // the newest history entry is the previous iteration's minimum
        if h.len() < 2 * n1 {
            return Ok(false);
        }
        let third = &self.state.x_min.x;
        let second = &h[h.len() - n1];
        let first = &h[h.len() - 2 * n1];
        let lambda_c = self.config.curve_step.unwrap_or(self.state.lambda);
        let Some(xc) = curve_extrapolate(first, second, third, lambda_c) else {
            return Ok(false);
        };
        match self.ev.try_point(xc)? {
            Some(p) if p.f < self.state.x_min.f => {
                self.state.x_min = p;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn drive(&mut self) -> Result<(), SolveError> {
        if self.stage == Stage::Start {
            self.stage1()?;
        }
        if self.stage == Stage::Directions {
            self.stage2()?;
        }
        while !self.stage3_iteration()? {}
        Ok(())
    }

    /// Run to termination.
    pub fn run(mut self) -> Result<RunResult, SolveError> {
        let status = match self.drive() {
            Ok(()) => Status::Converged,
            Err(SolveError::BudgetExhausted(_)) => Status::BudgetExhausted,
            Err(SolveError::NoFeasibleStart) => Status::NoFeasibleStart,
            Err(e) => return Err(e),
        };
        let mut best = self.state.x_min.clone();
        if let Some(seen) = self.ev.best() {
            if seen.f < best.f || best.f.is_nan() {
                best = seen.clone();
            }
        }
        let f_min = if best.f.is_nan() {
            f64::NAN
        } else {
            self.ev.raw_value(&best)
        };
        Ok(RunResult {
            max_equality_violation: self.ev.constraints().max_equality_violation(&best.x),
            x_min: best.x,
            f_min,
            evals: self.ev.evals(),
            line_searches: self.line_searches,
            iterations: self.state.iter,
            status,
        })
    }
}

fn shift_for(lambda: f64) -> f64 {
    let s = SHIFT_RATIO * lambda;
    // unreachable while lambda is floored at tol, kept for fidelity
    if s == 0.0 {
        lambda
    } else {
        s
    }
}

/// Point reached by following the parabola through three successive minima.
///
/// The coordinate with the widest strictly monotone progression is the
/// parabola argument; every other coordinate is interpolated through the
/// three points and extrapolated to `x3[m] +/- lambda_c`, continuing the
/// trend. `None` when no coordinate is strictly monotone.
pub fn curve_extrapolate(x1: &[f64], x2: &[f64], x3: &[f64], lambda_c: f64) -> Option<Vec<f64>> {
    let m = (0..x1.len())
        .filter(|&k| (x1[k] < x2[k] && x2[k] < x3[k]) || (x1[k] > x2[k] && x2[k] > x3[k]))
        .max_by(|&a, &b| {
            (x3[a] - x1[a])
                .abs()
                .total_cmp(&(x3[b] - x1[b]).abs())
                .then(b.cmp(&a))
        })?;
    let (t1, t2, t3) = (x1[m], x2[m], x3[m]);
    let t = if t3 > t1 { t3 + lambda_c } else { t3 - lambda_c };
    let l1 = (t - t2) * (t - t3) / ((t1 - t2) * (t1 - t3));
    let l2 = (t - t1) * (t - t3) / ((t2 - t1) * (t2 - t3));
    let l3 = (t - t1) * (t - t2) / ((t3 - t1) * (t3 - t2));
    let xc: Vec<f64> = (0..x1.len())
        .map(|k| {
            if k == m {
                t
            } else {
                l1 * x1[k] + l2 * x2[k] + l3 * x3[k]
            }
        })
        .collect();
    xc.iter().all(|v| v.is_finite()).then_some(xc)
}

/// Minimize (or maximize, per `config.sense`) an objective of `dim`
/// variables subject to `constraints`, starting from `config.x0`.
pub fn minimize(
    objective: &dyn Objective,
    constraints: &ConstraintSet,
    dim: usize,
    config: &SolverConfig,
) -> Result<RunResult, SolveError> {
    Solver::new(objective, constraints, dim, config)?.run()
}

/// [`minimize`], reporting every trial point to `observer`.
pub fn minimize_observed<'a>(
    objective: &'a dyn Objective,
    constraints: &'a ConstraintSet,
    dim: usize,
    config: &'a SolverConfig,
    observer: &'a mut Observer<'a>,
) -> Result<RunResult, SolveError> {
    Solver::new(objective, constraints, dim, config)?
        .with_observer(observer)
        .run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_follows_parabolic_valley() {
        let xc = curve_extrapolate(&[0.2, 0.04], &[0.4, 0.16], &[0.6, 0.36], 0.2).unwrap();
        assert!((xc[0] - 0.8).abs() < 1e-15);
        assert!((xc[1] - 0.64).abs() < 1e-14);
    }

    #[test]
    fn curve_on_straight_line() {
        // y has the wider spread and becomes the argument
        let xc = curve_extrapolate(&[0.0, 1.0], &[1.0, 3.0], &[2.0, 5.0], 1.0).unwrap();
        assert!((xc[0] - 2.5).abs() < 1e-15);
        assert!((xc[1] - 6.0).abs() < 1e-14);
        // decreasing argument continues downwards
        let xc = curve_extrapolate(&[2.0, 5.0], &[1.0, 3.0], &[0.0, 1.0], 1.0).unwrap();
        assert!((xc[0] + 0.5).abs() < 1e-15);
        assert!(xc[1].abs() < 1e-14);
    }

    #[test]
    fn curve_needs_monotone_coordinate() {
        assert!(curve_extrapolate(&[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0], 0.5).is_none());
        assert!(curve_extrapolate(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], 0.5).is_none());
    }

    #[test]
    fn stage1_quasi_gradient() {
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let c = ConstraintSet::new();
        let cfg = SolverConfig::default();
        let mut s = Solver::new(&f, &c, 2, &cfg).unwrap();
        let u1 = s.stage1().unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((u1[0] + r).abs() < 1e-15 && (u1[1] + r).abs() < 1e-15);
        assert_eq!(s.line_searches(), 1);
        // exact along the diagonal through the origin
        assert!(s.state().x_min.f < 1e-20);
    }

    #[test]
    fn stage1_flat_start() {
        let f = |_: &[f64]| 1.0;
        let c = ConstraintSet::new();
        let cfg = SolverConfig::default();
        let mut s = Solver::new(&f, &c, 3, &cfg).unwrap();
        assert_eq!(s.stage1().unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn stage1_single_variable_dependence() {
        let f = |x: &[f64]| x[0];
        let c = ConstraintSet::new();
        let cfg = SolverConfig {
            x0: Some(vec![0.0, 0.0]),
            max_evals: 200,
            ..SolverConfig::default()
        };
        let mut s = Solver::new(&f, &c, 2, &cfg).unwrap();
        match s.stage1() {
            Ok(u1) => assert_eq!(u1, vec![-1.0, 0.0]),
            Err(SolveError::BudgetExhausted(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn step_adaptation_arithmetic() {
        assert!((adapt_step(Mode::Local, 1.0, 2.0, None, 1e-6) - 0.691).abs() < 1e-15);
    }

    #[test]
    fn infeasible_start_status() {
        let f = |x: &[f64]| x[0];
        let c = ConstraintSet::new().non_negative(|x| -x[0]);
        let r = minimize(&f, &c, 1, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::NoFeasibleStart);
        assert_eq!(r.evals, 0);
    }

    #[test]
    fn invalid_config_rejected() {
        let f = |x: &[f64]| x[0];
        let c = ConstraintSet::new();
        for cfg in [
            SolverConfig {
                lambda0: 0.0,
                ..SolverConfig::default()
            },
            SolverConfig {
                n_exit: 0,
                ..SolverConfig::default()
            },
            SolverConfig {
                tol2: -1.0,
                ..SolverConfig::default()
            },
        ] {
            assert!(matches!(
                minimize(&f, &c, 1, &cfg),
                Err(SolveError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn one_dimensional_problem() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + 1.0;
        let cfg = SolverConfig {
            x0: Some(vec![0.0]),
            ..SolverConfig::default()
        };
        let r = minimize(&f, &ConstraintSet::new(), 1, &cfg).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.x_min[0] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn maximization() {
        let f = |x: &[f64]| 5.0 - (x[0] - 1.0).powi(2) - (x[1] + 1.0).powi(2);
        let cfg = SolverConfig {
            sense: Sense::Maximize,
            ..SolverConfig::default()
        };
        let r = minimize(&f, &ConstraintSet::new(), 2, &cfg).unwrap();
        assert!((r.f_min - 5.0).abs() < 1e-10);
        assert!((r.x_min[0] - 1.0).abs() < 1e-5 && (r.x_min[1] + 1.0).abs() < 1e-5);
    }

    #[test]
    fn budget_exhaustion_reports_best_point() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let cfg = SolverConfig {
            x0: Some(vec![-1.0, 2.0]),
            max_evals: 25,
            ..SolverConfig::default()
        };
        let r = minimize(&f, &ConstraintSet::new(), 2, &cfg).unwrap();
        assert_eq!(r.status, Status::BudgetExhausted);
        assert_eq!(r.evals, 25);
        assert!(r.f_min < f(&[-1.0, 2.0]));
        assert_eq!(r.f_min, f(&r.x_min));
    }
}
