use crate::constraints::{is_feasible, ConstraintSet, Feasibility};
use crate::error::SolveError;
use crate::modes::GridMask;
use crate::{Objective, Point};

/// One trial point seen by the solver, reported to an observer.
#[derive(Debug, Clone, Copy)]
pub struct Trial<'a> {
    /// Number of objective evaluations so far, this one included.
    pub eval_index: u64,
    pub x: &'a [f64],
    /// Raw objective value; `None` for infeasible trials, which are never
    /// evaluated.
    pub f: Option<f64>,
    pub feasible: bool,
}

pub type Observer<'a> = dyn FnMut(&Trial<'_>) + 'a;

/// Counts, rounds, filters and records every trial of one run.
pub(crate) struct Evaluator<'a> {
    objective: &'a dyn Objective,
    constraints: &'a ConstraintSet,
    sign: f64,
    penalty: f64,
    grid: Option<&'a GridMask>,
    max_evals: u64,
    evals: u64,
    best: Option<Point>,
    observer: Option<&'a mut Observer<'a>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        objective: &'a dyn Objective,
        constraints: &'a ConstraintSet,
        sign: f64,
        penalty: f64,
        grid: Option<&'a GridMask>,
        max_evals: u64,
    ) -> Self {
        Self {
            objective,
            constraints,
            sign,
            penalty,
            grid,
            max_evals,
            evals: 0,
            best: None,
            observer: None,
        }
    }

    pub fn set_observer(&mut self, observer: &'a mut Observer<'a>) {
        self.observer = Some(observer);
    }

    pub fn evals(&self) -> u64 {
        self.evals
    }

    pub fn best(&self) -> Option<&Point> {
        self.best.as_ref()
    }

    pub fn constraints(&self) -> &ConstraintSet {
        self.constraints
    }

    /// Snap `x` onto the discrete grid, if any.
    pub fn prepare(&self, x: Vec<f64>) -> Vec<f64> {
        match self.grid {
            Some(g) => g.round(&x),
            None => x,
        }
    }

    /// Evaluate a point already known to be feasible.
    pub fn eval(&mut self, x: Vec<f64>) -> Result<Point, SolveError> {
        if self.evals >= self.max_evals {
            return Err(SolveError::BudgetExhausted(self.max_evals));
        }
        self.evals += 1;
        let raw = self.objective.eval(&x).map_err(SolveError::Objective)?;
        let mut f = self.sign * raw;
        if !self.constraints.h.is_empty() {
            f += self.penalty * self.constraints.equality_residual(&x);
        }
        if f.is_nan() {
            f = f64::INFINITY;
        }
        if let Some(obs) = self.observer.as_mut() {
            obs(&Trial {
                eval_index: self.evals,
                x: &x,
                f: Some(raw),
                feasible: true,
            });
        }
        let point = Point { x, f };
        if self.best.as_ref().is_none_or(|b| point.f < b.f) {
            self.best = Some(point.clone());
        }
        Ok(point)
    }

    /// Round, check and evaluate; `None` when the rounded point is infeasible.
    pub fn try_point(&mut self, x: Vec<f64>) -> Result<Option<Point>, SolveError> {
        match self.probe(x)? {
            Some(x) => self.eval(x).map(Some),
            None => Ok(None),
        }
    }

    /// Merit value back to the raw objective value.
    pub fn raw_value(&self, p: &Point) -> f64 {
        let mut merit = p.f;
        if !self.constraints.h.is_empty() {
            merit -= self.penalty * self.constraints.equality_residual(&p.x);
        }
        self.sign * merit
    }
}

impl Feasibility for Evaluator<'_> {
    fn probe(&mut self, x: Vec<f64>) -> Result<Option<Vec<f64>>, SolveError> {
        let x = self.prepare(x);
        if !self.constraints.has_inequalities() || is_feasible(self.constraints, &x)? {
            return Ok(Some(x));
        }
        if let Some(obs) = self.observer.as_mut() {
            obs(&Trial {
                eval_index: self.evals,
                x: &x,
                f: None,
                feasible: false,
            });
        }
        Ok(None)
    }
}
