//! Benchmark problems and the adapter for external black-box programs.

use std::sync::Arc;

use crate::constraints::ConstraintSet;
use crate::Objective;

mod blackbox;

pub use blackbox::{blackbox_objective, format_f64, BlackBox, BlackBoxSpec};

/// Default limit on `|f_min - known_fmin|` for a run to count as a success.
pub const FAIL_THRESHOLD: f64 = 1e-3;

#[derive(Clone)]
pub struct Problem {
    pub name: &'static str,
    pub dim: usize,
    pub objective: Arc<dyn Objective>,
    pub constraints: ConstraintSet,
    pub known_fmin: Option<f64>,
    pub known_xmin: Option<Vec<f64>>,
    pub start_list: Option<Vec<Vec<f64>>>,
    pub fail_threshold: f64,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("known_fmin", &self.known_fmin)
            .field("known_xmin", &self.known_xmin)
            .finish_non_exhaustive()
    }
}

impl Problem {
    fn new(
        name: &'static str,
        dim: usize,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name,
            dim,
            objective: Arc::new(objective),
            constraints: ConstraintSet::new(),
            known_fmin: None,
            known_xmin: None,
            start_list: None,
            fail_threshold: FAIL_THRESHOLD,
        }
    }

    fn minimum(mut self, f: f64, x: Vec<f64>) -> Self {
        self.known_fmin = Some(f);
        self.known_xmin = Some(x);
        self
    }

    fn starts(mut self, starts: Vec<Vec<f64>>) -> Self {
        self.start_list = Some(starts);
        self
    }

    fn constrained(mut self, c: ConstraintSet) -> Self {
        self.constraints = c;
        self
    }

    /// Distance of a result value from the known optimum value.
    pub fn error(&self, f_min: f64) -> Option<f64> {
        self.known_fmin.map(|k| (f_min - k).abs())
    }
}

fn valley_starts() -> Vec<Vec<f64>> {
    (0..500)
        .map(|i| vec![-1.0 + i as f64, 2.0 + i as f64])
        .collect()
}

pub fn quad_fig1() -> Problem {
    Problem::new("quad_fig1", 2, |x| {
        x[0] * x[0] + x[1] * x[1] - 1.5 * x[0] * x[1]
    })
    .minimum(0.0, vec![0.0, 0.0])
    .starts(vec![vec![5.0, 3.0]])
}

pub fn rosenbrock() -> Problem {
    Problem::new("rosenbrock", 2, |x| {
        100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
    })
    .minimum(0.0, vec![1.0, 1.0])
    .starts(valley_starts())
}

pub fn abs_rosenbrock() -> Problem {
    Problem::new("abs_rosenbrock", 2, |x| {
        100.0 * (x[1] - x[0] * x[0]).abs() + (1.0 - x[0]).abs()
    })
    .minimum(0.0, vec![1.0, 1.0])
    .starts(valley_starts())
}

pub fn lin_wedge() -> Problem {
    Problem::new("lin_wedge", 2, |x| x[0] + 10.0 * x[1])
        .constrained(
            ConstraintSet::new()
                .non_negative(|x| 2.0 * x[0] - x[1])
                .non_negative(|x| x[1] - x[0] / 2.0),
        )
        .minimum(0.0, vec![0.0, 0.0])
        .starts((1..=500).map(|i| vec![i as f64, i as f64]).collect())
}

pub fn nonlin_maze() -> Problem {
    let c = ConstraintSet::new()
        .non_negative(|x| -1.0 - x[0])
        .non_negative(|x| x[0] + 17.001)
        .non_negative(|x| -1.0 - x[1])
        .non_negative(|x| x[1] + x[0] / 3.0 + 28.0)
        .non_negative(|x| (x[1] + 20.0).powi(2) - 3.0 * x[0] - 51.0)
        .non_negative(|x| (x[0] + 14.5).abs() + (x[1] + 15.0).powi(2) - 3.0)
        .non_negative(|x| (x[0] + 16.0).powi(2) + (x[1] + 8.0).abs().powf(1.5) - 20.0)
        .non_negative(|x| (x[0] + 9.2).powi(2) + (x[1] + 12.0).abs() - 7.0)
        .non_negative(|x| (x[0] + 6.0).powi(2) + (x[1] + 15.0).powi(2) - 29.8)
        .non_negative(|x| (x[0] + 6.0).powi(2) + (x[1] + 1.0).abs().powf(1.5) - 15.0);
    Problem::new("nonlin_maze", 2, |x| {
        (x[1] - x[0]).abs().powf(2.07) + (x[0] * x[1]).abs().powf(1.07)
    })
    .constrained(c)
    .minimum(1.0, vec![-1.0, -1.0])
    .starts(vec![vec![-1.1, -27.0]])
}

pub fn zigzag() -> Problem {
    let mut c = ConstraintSet::new().with_bounds(vec![(0.0, 100.0), (0.0, 101.01)]);
    for k in 0..7 {
        let left = 5.0 + 14.0 * k as f64;
        let right = left + 7.0;
        c = c
            .non_negative(move |x| x[0].abs() + (x[1] - left).abs().powf(3.5) - 99.9)
            .non_negative(move |x| (x[0] - 100.0).abs() + (x[1] - right).abs().powi(3) - 99.9);
    }
    Problem::new("zigzag", 2, |x| {
        (x[0] - 100.0).abs() / 200.0 + (x[1] - 101.0).abs()
    })
    .constrained(c)
    .minimum(0.0, vec![100.0, 101.0])
    .starts(vec![vec![0.0, 0.0]])
}

/// Four equal minima at `(+-1, +-1)`.
pub fn four_well() -> Problem {
    Problem::new("four_well", 2, |x| {
        (x[0] * x[0] - 1.0).powi(2) + (x[1] * x[1] - 1.0).powi(2)
    })
}

/// Four wells whose left pair is lowered by the linear tilt.
pub fn tilted_well() -> Problem {
    Problem::new("tilted_well", 2, |x| {
        (x[0] * x[0] - 1.0).powi(2) + 0.1 * x[0] + (x[1] * x[1] - 1.0).powi(2)
    })
}

/// Minimized over integers at `(3, 8)` with value `0.08`.
pub fn integer_quadratic() -> Problem {
    Problem::new("integer_quadratic", 2, |x| {
        (x[0] - 3.2).powi(2) + (x[1] - 7.8).powi(2)
    })
    .minimum(0.08, vec![3.0, 8.0])
}

/// The benchmark problems with known optima.
pub fn corpus() -> Vec<Problem> {
    vec![
        quad_fig1(),
        rosenbrock(),
        abs_rosenbrock(),
        lin_wedge(),
        nonlin_maze(),
        zigzag(),
    ]
}

/// Corpus problems plus the multistart test functions.
pub fn all() -> Vec<Problem> {
    let mut v = corpus();
    v.extend([four_well(), tilted_well(), integer_quadratic()]);
    v
}

pub fn by_name(name: &str) -> Option<Problem> {
    all().into_iter().find(|p| p.name == name)
}
