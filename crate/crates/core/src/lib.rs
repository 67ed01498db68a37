//! Derivative-free minimization by conjugate directions with orthogonal shift
//! (CDOS).
//!
//! The method builds `n` mutually conjugate search directions by shifting
//! sideways from the directions already built, so it terminates exactly on
//! quadratics after `n(n+1)/2` line searches, while the non-greedy shift keeps
//! it reliable on non-smooth objectives and along constraint boundaries.
//! Inequality constraints are handled directly: the solver only asks whether a
//! trial point is feasible and never evaluates the objective where it is not.
//!
//! ```
//! use cdos::{minimize, ConstraintSet, SolverConfig, Status};
//!
//! let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
//! let result = minimize(&f, &ConstraintSet::new(), 2, &SolverConfig::default()).unwrap();
//! assert_eq!(result.status, Status::Converged);
//! assert!((result.x_min[0] - 1.0).abs() < 1e-6);
//! ```

pub mod constraints;
pub mod error;
mod eval;
pub mod linalg;
pub mod linesearch;
pub mod modes;
pub mod problems;
pub mod solver;

pub use constraints::{is_feasible, ConstraintSet};
pub use error::{EvalError, LinalgError, SolveError};
pub use eval::Trial;
pub use linalg::DirectionSet;
pub use linesearch::{line_minimize, LineSearchResult};
pub use modes::{multistart, Grid, GridMask, Mode, ModeConfig, OptimaSet};
pub use problems::{corpus, BlackBox, BlackBoxSpec, Problem};
pub use solver::{minimize, RunResult, Sense, Solver, SolverConfig, SolverState, Status};

/// A black-box objective function.
///
/// Any `Fn(&[f64]) -> f64` closure is an objective; fallible objectives can be
/// wrapped in [`Fallible`].
pub trait Objective: Send + Sync {
    fn eval(&self, x: &[f64]) -> Result<f64, EvalError>;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(self(x))
    }
}

/// Adapter for objectives that can fail.
pub struct Fallible<F>(pub F);

impl<F> Objective for Fallible<F>
where
    F: Fn(&[f64]) -> Result<f64, EvalError> + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        (self.0)(x)
    }
}

/// An evaluated point. `f` is the value actually minimized, i.e. after sign
/// flipping for maximization and after adding any equality penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: Vec<f64>,
    pub f: f64,
}
