//! Feasibility model and direct inequality-constraint handling.
//!
//! Inequalities are only ever asked "violated or not"; no degree of violation
//! is computed. Equalities are folded into the objective as a quadratic
//! penalty by the solver.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{EvalError, ScheduleError, SolveError};
use crate::linalg::axpy;
use crate::Objective;

/// Boolean black-box constraint: `true` means satisfied.
pub type Predicate = Arc<dyn Fn(&[f64]) -> Result<bool, EvalError> + Send + Sync>;

/// Real-valued constraint function.
pub type ConstraintFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Number of trials in the step reduction schedule.
pub const SCHEDULE_LEN: usize = 50;

/// Random draws allowed when searching for any feasible shift point.
pub const RANDOM_DRAWS: usize = 1000;

/// Draws between successive doublings of the sampling box.
const DRAWS_PER_WIDTH: usize = 100;

/// Fraction of the requested shift below which a shift is never reduced.
pub const SHIFT_FLOOR: f64 = 0.1;

/// Default equality penalty weight.
pub const DEFAULT_PENALTY: f64 = 1e4;

/// The constraint system of a problem.
///
/// * `c0`: predicates, feasible iff `true`
/// * `c1`: feasible iff `g(x) >= 0`
/// * `c2`: feasible iff `g(x) > 0`
/// * `c3`: feasible iff `g(x) != 0`
/// * `h`: equalities `h(x) = 0`, handled by penalty and never by [`is_feasible`]
/// * `bounds`: per-coordinate box, equivalent to two `c1` constraints each
#[derive(Clone, Default)]
pub struct ConstraintSet {
    pub c0: Vec<Predicate>,
    pub c1: Vec<ConstraintFn>,
    pub c2: Vec<ConstraintFn>,
    pub c3: Vec<ConstraintFn>,
    pub h: Vec<ConstraintFn>,
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl fmt::Debug for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintSet")
            .field("c0", &self.c0.len())
            .field("c1", &self.c1.len())
            .field("c2", &self.c2.len())
            .field("c3", &self.c3.len())
            .field("h", &self.h.len())
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn predicate(mut self, p: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.c0.push(Arc::new(move |x| Ok(p(x))));
        self
    }

    pub fn fallible_predicate(mut self, p: Predicate) -> Self {
        self.c0.push(p);
        self
    }

    /// `g(x) >= 0`
    pub fn non_negative(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.c1.push(Arc::new(g));
        self
    }

    /// `g(x) > 0`
    pub fn positive(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.c2.push(Arc::new(g));
        self
    }

    /// `g(x) != 0`
    pub fn non_zero(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.c3.push(Arc::new(g));
        self
    }

    /// `h(x) = 0`
    pub fn equality(mut self, h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.h.push(Arc::new(h));
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn has_inequalities(&self) -> bool {
        !(self.c0.is_empty()
            && self.c1.is_empty()
            && self.c2.is_empty()
            && self.c3.is_empty()
            && self.bounds.is_none())
    }

    /// Largest `|h_j(x)|`, zero without equalities.
    pub fn max_equality_violation(&self, x: &[f64]) -> f64 {
        self.h.iter().map(|h| h(x).abs()).fold(0.0, f64::max)
    }

    /// `sum_j h_j(x)^2`
    pub fn equality_residual(&self, x: &[f64]) -> f64 {
        self.h.iter().map(|h| h(x).powi(2)).sum()
    }
}

/// True iff every inequality constraint and bound holds at `x`.
///
/// Numeric constraints are checked before predicates so that an expensive
/// black-box predicate is only consulted for otherwise feasible points.
/// A NaN constraint value counts as a violation.
pub fn is_feasible(c: &ConstraintSet, x: &[f64]) -> Result<bool, SolveError> {
    if let Some(bounds) = &c.bounds {
        if x.iter()
            .zip(bounds)
            .any(|(xi, (lo, hi))| !(*xi >= *lo && *xi <= *hi))
        {
            return Ok(false);
        }
    }
    if c.c1.iter().any(|g| !(g(x) >= 0.0))
        || c.c2.iter().any(|g| !(g(x) > 0.0))
        || c.c3.iter().any(|g| {
            let v = g(x);
            v == 0.0 || v.is_nan()
        })
    {
        return Ok(false);
    }
    for p in &c.c0 {
        if !p(x).map_err(SolveError::Constraint)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reduction factor `eps_k` of the step reduction schedule, `1 <= k <= 50`.
pub fn reduction_factor(k: usize) -> Result<f64, ScheduleError> {
    let divisor = match k {
        1..=6 => 1.1,
        7..=8 => 1.2,
        9..=10 => 1.5,
        11..=16 => 2.0,
        17..=20 => 5.0,
        21..=40 => 10.0,
        41..=50 => 100.0,
        _ => return Err(ScheduleError::Exhausted(k)),
    };
    Ok(1.0 / divisor)
}

/// Iterator over the trial steps `lambda_0, lambda_1, ..., lambda_50`.
#[derive(Debug, Clone)]
pub struct StepSchedule {
    k: usize,
    lambda: f64,
}

impl StepSchedule {
    pub fn new(lambda0: f64) -> Self {
        Self { k: 0, lambda: lambda0 }
    }

    /// Trial counter of the step most recently returned by `next`.
    pub fn trial(&self) -> usize {
        self.k.saturating_sub(1)
    }
}

impl Iterator for StepSchedule {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.k > SCHEDULE_LEN {
            return None;
        }
        if self.k > 0 {
            self.lambda *= reduction_factor(self.k).ok()?;
        }
        self.k += 1;
        Some(self.lambda)
    }
}

/// Something that can accept or reject a trial point.
///
/// The probe may move the point (grid rounding); the returned point is the
/// one that was actually tested.
pub(crate) trait Feasibility {
    fn probe(&mut self, x: Vec<f64>) -> Result<Option<Vec<f64>>, SolveError>;
}

pub(crate) struct PlainFeasibility<'a>(pub &'a ConstraintSet);

impl Feasibility for PlainFeasibility<'_> {
    fn probe(&mut self, x: Vec<f64>) -> Result<Option<Vec<f64>>, SolveError> {
        Ok(is_feasible(self.0, &x)?.then_some(x))
    }
}

/// Step along one direction only: the largest schedule step whose trial
/// point is feasible, together with that point.
pub(crate) fn schedule_step_one_way(
    feas: &mut impl Feasibility,
    x: &[f64],
    u: &[f64],
    lambda0: f64,
) -> Result<Option<(f64, Vec<f64>)>, SolveError> {
    for lambda in StepSchedule::new(lambda0) {
        let trial = axpy(x, lambda, u);
        // steps below the resolution of x do not move
        if trial == x {
            break;
        }
        if let Some(p) = feas.probe(trial)? {
            return Ok(Some((lambda, p)));
        }
    }
    Ok(None)
}

/// Result of [`find_feasible_step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleStep {
    pub lambda: f64,
    /// The step is along `-u`.
    pub reversed: bool,
}

/// Largest step of the reduction schedule keeping `x + lambda * u` feasible.
///
/// When the whole schedule fails along `u` it is restarted along `-u`.
/// `None` means both directions are blocked.
pub fn find_feasible_step(
    c: &ConstraintSet,
    x: &[f64],
    u: &[f64],
    lambda0: f64,
) -> Result<Option<FeasibleStep>, SolveError> {
    find_feasible_step_with(&mut PlainFeasibility(c), x, u, lambda0)
        .map(|r| r.map(|(step, _)| step))
}

pub(crate) fn find_feasible_step_with(
    feas: &mut impl Feasibility,
    x: &[f64],
    u: &[f64],
    lambda0: f64,
) -> Result<Option<(FeasibleStep, Vec<f64>)>, SolveError> {
    if let Some((lambda, p)) = schedule_step_one_way(feas, x, u, lambda0)? {
        return Ok(Some((
            FeasibleStep {
                lambda,
                reversed: false,
            },
            p,
        )));
    }
    let back: Vec<f64> = u.iter().map(|v| -v).collect();
    Ok(schedule_step_one_way(feas, x, &back, lambda0)?.map(|(lambda, p)| {
        (
            FeasibleStep {
                lambda,
                reversed: true,
            },
            p,
        )
    }))
}

/// Feasible point for an orthogonal shift of nominal length `lambda_s`.
///
/// Tries the reduction schedule along `dir`, then along `-dir`, never going
/// below `0.1 * lambda_s`. If both fail, falls back to uniform random draws
/// in a box of half-width `2 * lambda_s` around `x`, doubling the half-width
/// every 100 draws, for at most 1000 draws.
pub fn feasible_shift_point<R: Rng>(
    c: &ConstraintSet,
    x: &[f64],
    dir: &[f64],
    lambda_s: f64,
    rng: &mut R,
) -> Result<Vec<f64>, SolveError> {
    feasible_shift_point_with(&mut PlainFeasibility(c), x, dir, lambda_s, rng)
}

pub(crate) fn feasible_shift_point_with<R: Rng>(
    feas: &mut impl Feasibility,
    x: &[f64],
    dir: &[f64],
    lambda_s: f64,
    rng: &mut R,
) -> Result<Vec<f64>, SolveError> {
    let floor = SHIFT_FLOOR * lambda_s;
    for sign in [1.0, -1.0] {
        for lambda in StepSchedule::new(lambda_s) {
            let lambda = lambda.max(floor);
            if let Some(p) = feas.probe(axpy(x, sign * lambda, dir))? {
                return Ok(p);
            }
            if lambda <= floor {
                break;
            }
        }
    }

    let mut half_width = 2.0 * lambda_s;
    for draw in 0..RANDOM_DRAWS {
        if draw > 0 && draw % DRAWS_PER_WIDTH == 0 {
            half_width *= 2.0;
        }
        let candidate: Vec<f64> = x
            .iter()
            .map(|xi| xi + half_width * rng.random_range(-1.0..=1.0))
            .collect();
        if let Some(p) = feas.probe(candidate)? {
            return Ok(p);
        }
    }
    Err(SolveError::NoFeasiblePoint(RANDOM_DRAWS))
}

/// Objective plus a quadratic equality penalty `mu * sum_j h_j(x)^2`.
pub struct Penalized<O> {
    objective: O,
    h: Vec<ConstraintFn>,
    mu: f64,
}

impl<O: Objective> Objective for Penalized<O> {
    fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let f = self.objective.eval(x)?;
        Ok(f + self.mu * self.h.iter().map(|h| h(x).powi(2)).sum::<f64>())
    }
}

pub fn penalized_objective<O: Objective>(
    objective: O,
    h: Vec<ConstraintFn>,
    mu: f64,
) -> Penalized<O> {
    assert!(mu > 0.0, "penalty weight must be positive");
    Penalized { objective, h, mu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wedge() -> ConstraintSet {
        ConstraintSet::new()
            .non_negative(|x| 2.0 * x[0] - x[1])
            .non_negative(|x| x[1] - x[0] / 2.0)
    }

    #[test]
    fn feasibility_examples() {
        let c = wedge();
        assert!(is_feasible(&c, &[100.0, 75.0]).unwrap());
        assert!(!is_feasible(&c, &[1.0, 3.0]).unwrap());
        assert!(is_feasible(&ConstraintSet::new(), &[1e300, -4.0]).unwrap());
    }

    #[test]
    fn strictness_of_constraint_kinds() {
        let c = ConstraintSet::new().positive(|x| x[0]);
        assert!(!is_feasible(&c, &[0.0]).unwrap());
        assert!(is_feasible(&c, &[1e-300]).unwrap());
        let c = ConstraintSet::new().non_zero(|x| x[0] - 1.0);
        assert!(!is_feasible(&c, &[1.0]).unwrap());
        assert!(is_feasible(&c, &[1.5]).unwrap());
        let c = ConstraintSet::new().non_negative(|_| f64::NAN);
        assert!(!is_feasible(&c, &[0.0]).unwrap());
        let c = ConstraintSet::new().with_bounds(vec![(0.0, 1.0)]);
        assert!(is_feasible(&c, &[1.0]).unwrap());
        assert!(!is_feasible(&c, &[1.0 + 1e-15]).unwrap());
    }

    #[test]
    fn equalities_do_not_affect_feasibility() {
        let c = ConstraintSet::new().equality(|x| x[0] - 1.0);
        assert!(is_feasible(&c, &[7.0]).unwrap());
        assert_eq!(c.max_equality_violation(&[7.0]), 6.0);
    }

    #[test]
    fn predicate_errors_propagate() {
        let c = ConstraintSet::new()
            .fallible_predicate(Arc::new(|_| Err(EvalError::Other("boom".into()))));
        assert!(matches!(
            is_feasible(&c, &[0.0]),
            Err(SolveError::Constraint(EvalError::Other(_)))
        ));
    }

    #[test]
    fn schedule_table() {
        assert_eq!(reduction_factor(1).unwrap(), 1.0 / 1.1);
        assert_eq!(reduction_factor(6).unwrap(), 1.0 / 1.1);
        assert_eq!(reduction_factor(7).unwrap(), 1.0 / 1.2);
        assert_eq!(reduction_factor(9).unwrap(), 1.0 / 1.5);
        assert_eq!(reduction_factor(16).unwrap(), 0.5);
        assert_eq!(reduction_factor(17).unwrap(), 0.2);
        assert_eq!(reduction_factor(40).unwrap(), 0.1);
        assert_eq!(reduction_factor(45).unwrap(), 0.01);
        assert_eq!(reduction_factor(50).unwrap(), 0.01);
        assert_eq!(reduction_factor(0), Err(ScheduleError::Exhausted(0)));
        assert_eq!(reduction_factor(51), Err(ScheduleError::Exhausted(51)));
    }

    #[test]
    fn schedule_is_monotone_and_vanishing() {
        let factors: Vec<f64> = (1..=50).map(|k| reduction_factor(k).unwrap()).collect();
        assert!(factors.windows(2).all(|w| w[1] <= w[0]));
        assert!(factors.iter().product::<f64>() < 1e-40);
        let steps: Vec<f64> = StepSchedule::new(1.0).collect();
        assert_eq!(steps.len(), 51);
        assert_eq!(steps[0], 1.0);
        assert!((steps[1] - 1.0 / 1.1).abs() < 1e-16);
    }

    #[test]
    fn feasible_step_examples() {
        let none = ConstraintSet::new();
        let s = find_feasible_step(&none, &[0.0, 0.0], &[1.0, 0.0], 2.5).unwrap();
        assert_eq!(
            s,
            Some(FeasibleStep {
                lambda: 2.5,
                reversed: false
            })
        );

        let s = find_feasible_step(&wedge(), &[100.0, 75.0], &[0.0, -1.0], 1.0).unwrap();
        assert_eq!(
            s,
            Some(FeasibleStep {
                lambda: 1.0,
                reversed: false
            })
        );
    }

    #[test]
    fn feasible_step_reverses_on_boundary() {
        // (1, 2) lies on y = 2x; moving up leaves the wedge at every step size.
        let x = [1.0, 2.0];
        assert!(is_feasible(&wedge(), &x).unwrap());
        let s = find_feasible_step(&wedge(), &x, &[0.0, 1.0], 1.0)
            .unwrap()
            .unwrap();
        assert!(s.reversed);
        assert_eq!(s.lambda, 1.0);
        assert!(is_feasible(&wedge(), &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn feasible_step_not_found() {
        let c = ConstraintSet::new().predicate(|x| x[0] == 0.0);
        assert_eq!(find_feasible_step(&c, &[0.0], &[1.0], 1.0).unwrap(), None);
    }

    #[test]
    fn feasible_step_matches_schedule_replay() {
        // Feasible region x <= 0.3; the first feasible schedule step from 0
        // must be the first member of the replayed schedule below 0.3.
        let c = ConstraintSet::new().non_negative(|x| 0.3 - x[0]);
        let s = find_feasible_step(&c, &[0.0], &[1.0], 1.0).unwrap().unwrap();
        let mut lambda = 1.0;
        let mut k = 0;
        while lambda > 0.3 {
            k += 1;
            lambda *= reduction_factor(k).unwrap();
        }
        assert_eq!(s.lambda, lambda);
        assert!(!s.reversed);
    }

    #[test]
    fn shift_unconstrained() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = feasible_shift_point(&ConstraintSet::new(), &[1.0, 1.0], &[0.0, 1.0], 0.62, &mut rng)
            .unwrap();
        assert_eq!(p, vec![1.0, 1.62]);
    }

    #[test]
    fn shift_reverses_with_floor() {
        // Feasible iff y <= 1: going up from y = 1 is always blocked.
        let c = ConstraintSet::new().non_negative(|x| 1.0 - x[1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = feasible_shift_point(&c, &[0.0, 1.0], &[0.0, 1.0], 0.5, &mut rng).unwrap();
        assert!(is_feasible(&c, &p).unwrap());
        assert_eq!(p[0], 0.0);
        assert!(1.0 - p[1] >= 0.1 * 0.5);
    }

    #[test]
    fn shift_random_fallback() {
        // Feasible pocket: a thin annulus around x that no axis-aligned shift hits.
        let c = ConstraintSet::new().predicate(|x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            r < 1e-9 || (r > 0.2 && r < 0.6 && x[0] > 0.1 && x[1] > 0.1)
        });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = feasible_shift_point(&c, &[0.0, 0.0], &[1.0, 0.0], 0.5, &mut rng).unwrap();
        assert!(is_feasible(&c, &p).unwrap());
        assert!(p[0].abs() <= 2.0 && p[1].abs() <= 2.0);
        assert_ne!(p, vec![0.0, 0.0]);
    }

    #[test]
    fn shift_exhausts_random_budget() {
        let c = ConstraintSet::new().predicate(|x| x[0] == 0.0 && x[1] == 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let err = feasible_shift_point(&c, &[0.0, 0.0], &[1.0, 0.0], 0.5, &mut rng).unwrap_err();
        assert_eq!(err, SolveError::NoFeasiblePoint(RANDOM_DRAWS));
    }

    #[test]
    fn penalty_values() {
        let zero = |_: &[f64]| 0.0;
        let p = penalized_objective(zero, vec![Arc::new(|x: &[f64]| x[0] - 1.0)], 10.0);
        assert_eq!(p.eval(&[3.0]).unwrap(), 40.0);
        let f = |x: &[f64]| x[0].sin();
        let p = penalized_objective(f, Vec::new(), 5.0);
        for x in [-2.0, 0.0, 0.7, 13.0] {
            assert_eq!(p.eval(&[x]).unwrap(), x.sin());
        }
    }
}
