use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use cdos::problems::{corpus, lin_wedge, nonlin_maze, zigzag, Problem};
use cdos::{is_feasible, minimize, ConstraintSet, Solver, SolverConfig, Status};

/// Objective wrapper counting evaluations at infeasible points.
struct Counted {
    problem: Problem,
    infeasible: Arc<AtomicU64>,
}

impl cdos::Objective for Counted {
    fn eval(&self, x: &[f64]) -> Result<f64, cdos::EvalError> {
        if !is_feasible(&self.problem.constraints, x).unwrap() {
            self.infeasible.fetch_add(1, Ordering::Relaxed);
        }
        self.problem.objective.eval(x)
    }
}

fn run_counted(p: &Problem, cfg: &SolverConfig) -> (cdos::RunResult, u64) {
    let infeasible = Arc::new(AtomicU64::new(0));
    let f = Counted {
        problem: p.clone(),
        infeasible: Arc::clone(&infeasible),
    };
    let r = minimize(&f, &p.constraints, p.dim, cfg).unwrap();
    (r, infeasible.load(Ordering::Relaxed))
}

#[test]
fn constrained_runs_never_evaluate_infeasible_points() {
    for p in [nonlin_maze(), zigzag()] {
        let cfg = SolverConfig {
            x0: p.start_list.as_ref().map(|s| s[0].clone()),
            n_exit: 10,
            ..SolverConfig::default()
        };
        let (r, bad) = run_counted(&p, &cfg);
        assert_eq!(bad, 0, "{}", p.name);
        assert!(r.f_min - p.known_fmin.unwrap() <= 1e-3, "{}: {}", p.name, r.f_min);
    }
    let p = lin_wedge();
    for x0 in p.start_list.as_ref().unwrap().iter().step_by(25) {
        let cfg = SolverConfig {
            x0: Some(x0.clone()),
            ..SolverConfig::default()
        };
        let (r, bad) = run_counted(&p, &cfg);
        assert_eq!(bad, 0);
        assert!(r.f_min <= 1e-3, "{x0:?}: {}", r.f_min);
    }
}

#[test]
fn identical_seeds_give_identical_results() {
    for p in corpus() {
        let cfg = SolverConfig {
            x0: p.start_list.as_ref().map(|s| s[s.len() / 2].clone()),
            seed: 99,
            ..SolverConfig::default()
        };
        let a = minimize(p.objective.as_ref(), &p.constraints, p.dim, &cfg).unwrap();
        let b = minimize(p.objective.as_ref(), &p.constraints, p.dim, &cfg).unwrap();
        assert_eq!(a, b, "{}", p.name);
        assert_eq!(a.f_min.to_bits(), b.f_min.to_bits());
    }
}

#[test]
fn steps_stay_positive() {
    let p = cdos::problems::rosenbrock();
    let c = ConstraintSet::new();
    let cfg = SolverConfig {
        x0: Some(vec![-1.0, 2.0]),
        ..SolverConfig::default()
    };
    let mut s = Solver::new(p.objective.as_ref(), &c, 2, &cfg).unwrap();
    s.stage1().unwrap();
    s.stage2().unwrap();
    while !s.stage3_iteration().unwrap() {
        assert!(s.state().lambda > 0.0 && s.state().lambda_s > 0.0);
    }
    assert!(s.state().lambda > 0.0 && s.state().lambda_s > 0.0);
}

#[test]
fn rosenbrock_from_standard_start() {
    let p = cdos::problems::rosenbrock();
    let cfg = SolverConfig {
        x0: Some(vec![-1.0, 2.0]),
        ..SolverConfig::default()
    };
    let r = minimize(p.objective.as_ref(), &p.constraints, 2, &cfg).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert!(r.f_min <= 1e-6);
    assert!((r.x_min[0] - 1.0).abs() <= 1e-4 && (r.x_min[1] - 1.0).abs() <= 1e-4);
}

#[test]
fn equality_penalty_closed_form() {
    let mu = 1e6;
    let f = |x: &[f64]| x[0] * x[0];
    let c = ConstraintSet::new().equality(|x| x[0] - 1.0);
    let cfg = SolverConfig {
        penalty: mu,
        x0: Some(vec![0.0]),
        ..SolverConfig::default()
    };
    let r = minimize(&f, &c, 1, &cfg).unwrap();
    let exact = mu / (1.0 + mu);
    assert!((r.x_min[0] - exact).abs() <= 1e-6, "{}", r.x_min[0]);
    assert!((r.x_min[0] - 1.0).abs() <= 1e-3);
    // reported value excludes the penalty
    assert!((r.f_min - r.x_min[0] * r.x_min[0]).abs() <= 1e-12);
    assert!((r.max_equality_violation - (1.0 - r.x_min[0]).abs()).abs() <= 1e-12);
}

#[test]
fn maximization_reports_caller_sign() {
    let f = |x: &[f64]| 3.0 - (x[0] - 1.0).powi(2) - (x[1] + 0.5).powi(2);
    let cfg = SolverConfig {
        sense: cdos::Sense::Maximize,
        ..SolverConfig::default()
    };
    let r = minimize(&f, &ConstraintSet::new(), 2, &cfg).unwrap();
    assert!((r.f_min - 3.0).abs() <= 1e-10);
}
