//! One-dimensional minimization along a direction.
//!
//! The step is doubled while it keeps decreasing the objective; the first
//! unsuccessful step closes a bracket and a single parabola through the last
//! three points gives the final candidate. If the very first step fails the
//! opposite direction is tried the same way.

use thiserror::Error;

use crate::constraints::{ConstraintSet, Feasibility, StepSchedule};
use crate::error::SolveError;
use crate::eval::Evaluator;
use crate::linalg::axpy;
use crate::{Objective, Point};

/// Successful moves allowed per direction before giving up on a bracket.
pub const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchResult {
    pub x_min: Vec<f64>,
    pub f_min: f64,
    /// Objective evaluations spent, including the start point when the
    /// caller did not supply its value.
    pub evals: u64,
    pub moved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("parabola through the three samples is degenerate")]
pub struct DegenerateParabola;

/// Signed distance from the first of three collinear samples to the vertex of
/// the interpolating parabola.
///
/// The samples sit at `0`, `d12` and `d13` along the line with values `f1`,
/// `f2`, `f3`.
pub fn parabolic_step(
    d12: f64,
    d13: f64,
    f1: f64,
    f2: f64,
    f3: f64,
) -> Result<f64, DegenerateParabola> {
    let (x0, x1, x2) = (0.0, d12, d13);
    let num = x0 * x0 * (f3 - f2) + x1 * x1 * (f1 - f3) + x2 * x2 * (f2 - f1);
    let den = f3 * (x0 - x1) + f2 * (x2 - x0) + f1 * (x1 - x2);
    let scale = f1.abs().max(f2.abs()).max(f3.abs()).max(1.0);
    if !(den.abs() >= 1e-300 * scale) {
        return Err(DegenerateParabola);
    }
    Ok(0.5 * num / den)
}

/// Line minimization of `f` from `start` along `u` with initial step `lambda`.
///
/// Trial points are screened by `c` before evaluation; blocked steps are
/// shortened by the reduction schedule. `start` must be feasible.
pub fn line_minimize(
    f: &dyn Objective,
    c: &ConstraintSet,
    start: &[f64],
    u: &[f64],
    lambda: f64,
) -> Result<LineSearchResult, SolveError> {
    let mut ev = Evaluator::new(f, c, 1.0, 0.0, None, u64::MAX);
    let start = match ev.try_point(start.to_vec())? {
        Some(p) => p,
        None => return Err(SolveError::NoFeasibleStart),
    };
    let (best, moved) = line_minimize_in(&mut ev, &start, u, lambda)?;
    Ok(LineSearchResult {
        x_min: best.x,
        f_min: best.f,
        evals: ev.evals(),
        moved,
    })
}

#[derive(Debug, Clone)]
struct Sample {
    /// Distance from the start along the walking direction.
    tau: f64,
    point: Point,
}

enum Walk {
    /// The first step did not decrease the objective. Holds that step's
    /// sample when it could be evaluated at all.
    Failed(Option<Sample>),
    Moved {
        prev: Sample,
        cur: Sample,
        fail: Option<Sample>,
    },
}

fn walk(
    ev: &mut Evaluator<'_>,
    start: &Point,
    dir: &[f64],
    lambda: f64,
) -> Result<Walk, SolveError> {
    let mut prev: Option<Sample> = None;
    let mut cur = Sample {
        tau: 0.0,
        point: start.clone(),
    };
    let mut step = lambda;
    for _ in 0..MAX_DOUBLINGS {
        let mut trial = None;
        for taken in StepSchedule::new(step) {
            let tau = cur.tau + taken;
            if let Some(x) = ev.probe(axpy(&start.x, tau, dir))? {
                trial = Some((taken, tau, x));
                break;
            }
        }
        let Some((taken, tau, x)) = trial else { break };
        let sample = Sample {
            tau,
            point: ev.eval(x)?,
        };
        if sample.point.f < cur.point.f {
            prev = Some(std::mem::replace(&mut cur, sample));
            step = 2.0 * taken;
        } else {
            return Ok(match prev {
                None => Walk::Failed(Some(sample)),
                Some(prev) => Walk::Moved {
                    prev,
                    cur,
                    fail: Some(sample),
                },
            });
        }
    }
    Ok(match prev {
        None => Walk::Failed(None),
        Some(prev) => Walk::Moved {
            prev,
            cur,
            fail: None,
        },
    })
}

/// Parabolic fits per line search after the first; each one shrinks the
/// bracket around the best sample.
pub const MAX_REFINEMENTS: usize = 40;

/// Relative decrease below which a refining fit ends the search.
const REFINE_TOL: f64 = 1e-10;

/// Fraction of the bracket width within which a refit counts as landing on
/// the current minimum.
const NEAR_MID: f64 = 1e-3;

/// Vertex position of the parabola through three samples ordered by `tau`,
/// kept inside `[s0, s0 + 2 * d13]`.
fn vertex_tau(s: [&Sample; 3]) -> Option<f64> {
    let d12 = s[1].tau - s[0].tau;
    let d13 = s[2].tau - s[0].tau;
    let d = parabolic_step(d12, d13, s[0].point.f, s[1].point.f, s[2].point.f).ok()?;
    d.is_finite().then(|| s[0].tau + d.clamp(0.0, 2.0 * d13))
}

/// Evaluate the point at `tau` unless it is infeasible or coincides with one
/// of the samples.
fn sample_at(
    ev: &mut Evaluator<'_>,
    start: &Point,
    dir: &[f64],
    tau: f64,
    known: [&Sample; 3],
) -> Result<Option<Sample>, SolveError> {
    let x = axpy(&start.x, tau, dir);
    // checked before probing too, so a black-box predicate is not consulted
    if known.iter().any(|p| p.point.x == x) {
        return Ok(None);
    }
    let Some(x) = ev.probe(x)? else {
        return Ok(None);
    };
    if known.iter().any(|p| p.point.x == x) {
        return Ok(None);
    }
    Ok(Some(Sample {
        tau,
        point: ev.eval(x)?,
    }))
}

/// Fit a parabola through a bracket `lo < mid < hi` with `mid` lowest, then
/// keep refitting on the shrunken bracket until a fit gains almost nothing.
///
/// A refit bisects the larger half instead when its vertex lands next to
/// `mid` or the bracket failed to halve over the previous two fits, so the
/// bracket keeps shrinking on non-quadratic slices.
fn settle(
    ev: &mut Evaluator<'_>,
    start: &Point,
    dir: &[f64],
    mut lo: Sample,
    mut mid: Sample,
    mut hi: Sample,
) -> Result<Point, SolveError> {
    let mut widths = [f64::INFINITY; 2];
    for fit in 0..=MAX_REFINEMENTS {
        let flat = lo.point.f.max(hi.point.f) - mid.point.f;
        if fit > 0 && flat <= REFINE_TOL * (1.0 + mid.point.f.abs()) {
            break;
        }
        let Some(mut tau) = vertex_tau([&lo, &mid, &hi]) else { break };
        let width = hi.tau - lo.tau;
        let slow = width > 0.5 * widths[0];
        widths = [widths[1], width];
        if fit > 0 && (slow || (tau - mid.tau).abs() < NEAR_MID * width) {
            tau = if mid.tau - lo.tau > hi.tau - mid.tau {
                0.5 * (lo.tau + mid.tau)
            } else {
                0.5 * (mid.tau + hi.tau)
            };
        }
        if !(tau > lo.tau && tau < hi.tau) {
            break;
        }
        let Some(v) = sample_at(ev, start, dir, tau, [&lo, &mid, &hi])? else {
            break;
        };
        let gain = mid.point.f - v.point.f;
        if gain > 0.0 {
            if v.tau < mid.tau {
                hi = std::mem::replace(&mut mid, v);
            } else {
                lo = std::mem::replace(&mut mid, v);
            }
            if gain <= REFINE_TOL * (1.0 + mid.point.f.abs()) {
                break;
            }
        } else if v.tau < mid.tau {
            lo = v;
        } else {
            hi = v;
        }
    }
    Ok(mid.point)
}

fn finish(
    ev: &mut Evaluator<'_>,
    start: &Point,
    dir: &[f64],
    prev: Sample,
    cur: Sample,
    fail: Option<Sample>,
) -> Result<Point, SolveError> {
    match fail {
        Some(fail) => settle(ev, start, dir, prev, cur, fail),
        None => Ok(cur.point),
    }
}

/// Core line search on a shared evaluator. Returns the best point and whether
/// it differs from `start`.
pub(crate) fn line_minimize_in(
    ev: &mut Evaluator<'_>,
    start: &Point,
    u: &[f64],
    lambda: f64,
) -> Result<(Point, bool), SolveError> {
    let ahead = match walk(ev, start, u, lambda)? {
        Walk::Moved { prev, cur, fail } => return Ok((finish(ev, start, u, prev, cur, fail)?, true)),
        Walk::Failed(sample) => sample,
    };

    let back: Vec<f64> = u.iter().map(|v| -v).collect();
    let behind = match walk(ev, start, &back, lambda)? {
        Walk::Moved { prev, cur, fail } => {
            return Ok((finish(ev, start, &back, prev, cur, fail)?, true))
        }
        Walk::Failed(sample) => sample,
    };

    // Both first steps failed: the start is bracketed by the two probes.
    if let (Some(a), Some(b)) = (ahead, behind) {
        let b = Sample {
            tau: -b.tau,
            point: b.point,
        };
        let mid = Sample {
            tau: 0.0,
            point: start.clone(),
        };
        let best = settle(ev, start, u, b, mid, a)?;
        if best.f < start.f {
            return Ok((best, true));
        }
    }
    Ok((start.clone(), false))
}
