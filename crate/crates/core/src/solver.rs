//! Iterative fixed-point and coincidence-point search.
//!
//! `picard_multivalued` realizes the constructive side of the
//! multi-valued contraction principle: each iterate is the metric
//! projection of the previous one onto its image set. `jungck_hybrid`
//! searches for a coincidence point of a hybrid pair by inverting `f`
//! approximately over a grid at every step.

use crate::error::{Error, Result};
use crate::pairs::HybridPair;
use crate::piecewise::PiecewiseSetMap;
use crate::set::point_set_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    Stuck,
}

/// One iteration record: the current point, the selected member of its
/// image set, and the step distance to the next iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitStep {
    pub x: f64,
    pub chosen: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub steps: Vec<OrbitStep>,
    pub termination: Termination,
    pub final_x: f64,
    /// Fixed-point defect `d(x*, T x*)` at the final iterate.
    pub residual: f64,
}

/// Picard iteration `x_{n+1} = proj_{T(x_n)}(x_n)` (nearest point, ties
/// toward the smaller value), stopping when the step length drops to
/// `tol`.
pub fn picard_multivalued(
    t: &PiecewiseSetMap,
    x0: f64,
    tol: f64,
    max_iters: usize,
) -> Result<OrbitTrace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tol must be > 0, got {tol}")));
    }
    if !t.domain().contains(x0) {
        return Err(Error::OutOfDomain { x: x0 });
    }
    let mut x = x0;
    let mut steps = Vec::new();
    for _ in 0..max_iters {
        let tx = t.eval(x)?;
        let y = tx.project(x);
        let step = (y - x).abs();
        steps.push(OrbitStep { x, chosen: y, step });
        if !t.domain().contains_with_tol(y, 1e-12) {
            return Err(Error::EscapedDomain { x: y });
        }
        if step <= tol {
            let residual = point_set_distance(y, &t.eval(y)?);
            return Ok(OrbitTrace {
                steps,
                termination: Termination::Converged,
                final_x: y,
                residual,
            });
        }
        x = y;
    }
    let residual = point_set_distance(x, &t.eval(x)?);
    Ok(OrbitTrace {
        steps,
        termination: Termination::MaxIters,
        final_x: x,
        residual,
    })
}

/// Result of the hybrid coincidence search: `v` approximately solves
/// `f(v) ∈ T(v)` with the reported defect.
#[derive(Debug, Clone, PartialEq)]
pub struct JungckOutcome {
    pub trace: OrbitTrace,
    pub v: f64,
    pub defect: f64,
}

/// Jungck-style iteration: `x_{n+1}` is the grid argmin of
/// `d(f(·), T(x_n))` (an approximate solution of `f(x_{n+1}) ∈ T(x_n)`),
/// stopping when the coincidence defect at the new point drops to
/// `tol`. Terminates as `Stuck` after five non-improving iterations.
pub fn jungck_hybrid(
    pair: &HybridPair,
    x0: f64,
    tol: f64,
    max_iters: usize,
    grid_points: usize,
) -> Result<JungckOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tol must be > 0, got {tol}")));
    }
    if !pair.domain().contains(x0) {
        return Err(Error::OutOfDomain { x: x0 });
    }
    let mut grid = pair.domain().sample_grid(grid_points);
    grid.extend(pair.breakpoints());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let f_on_grid: Vec<f64> = grid
        .iter()
        .map(|&g| pair.f.eval(g))
        .collect::<Result<_>>()?;

    let defect_at =
        |v: f64| -> Result<f64> { Ok(point_set_distance(pair.f.eval(v)?, &pair.t.eval(v)?)) };

    let mut x = x0;
    let mut steps = Vec::new();
    let mut best = (f64::INFINITY, x0);
    let mut non_improving = 0usize;
    for _ in 0..max_iters {
        let tx = pair.t.eval(x)?;
        let mut next = grid[0];
        let mut next_d = f64::INFINITY;
        for (i, &g) in grid.iter().enumerate() {
            let d = point_set_distance(f_on_grid[i], &tx);
            if d < next_d {
                next_d = d;
                next = g;
            }
        }
        let chosen = tx.project(pair.f.eval(next)?);
        steps.push(OrbitStep {
            x,
            chosen,
            step: (next - x).abs(),
        });
        let defect = defect_at(next)?;
        if defect < best.0 {
            best = (defect, next);
            non_improving = 0;
        } else {
            non_improving += 1;
        }
        if defect <= tol {
            return Ok(JungckOutcome {
                trace: OrbitTrace {
                    steps,
                    termination: Termination::Converged,
                    final_x: next,
                    residual: defect,
                },
                v: next,
                defect,
            });
        }
        if non_improving >= 5 {
            return Ok(JungckOutcome {
                trace: OrbitTrace {
                    steps,
                    termination: Termination::Stuck,
                    final_x: best.1,
                    residual: best.0,
                },
                v: best.1,
                defect: best.0,
            });
        }
        x = next;
    }
    let defect = best.0.min(defect_at(x)?);
    Ok(JungckOutcome {
        trace: OrbitTrace {
            steps,
            termination: Termination::MaxIters,
            final_x: best.1,
            residual: best.0,
        },
        v: best.1,
        defect,
    })
}
