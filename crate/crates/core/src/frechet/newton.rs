//! Newton's method inside one orthant, with boundary-aware step lengths.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::derivative::{gradient_from_paths, hessian_from_paths};
use super::{frechet_value, FrechetProblem, SolveTrace, StepKind, Termination, Tolerances};
use crate::error::Result;
use crate::split::Topology;
use crate::tree::TreePoint;

const MAX_CONDITION: f64 = 1e12;

/// Starting point in orthant `orthant`: each split gets its weighted mean
/// length over the data (floored at `eps`), pendants their weighted means.
pub fn quadratic_start(p: &FrechetProblem, orthant: &Topology, eps: f64) -> Result<TreePoint> {
    p.labels().check_same(orthant.labels())?;
    let edges = orthant
        .splits()
        .iter()
        .map(|s| {
            let m: f64 = p.data().iter().zip(p.weights()).map(|(t, w)| w * t.length(s)).sum();
            (*s, m.max(eps))
        })
        .collect();
    TreePoint::new(*p.labels(), edges, p.pendant_means())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn newton_direction(h: DMatrix<f64>, g: &[f64]) -> Option<Vec<f64>> {
    let eig = SymmetricEigen::new(h.clone());
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return None;
    }
    let chol = h.cholesky()?;
    let rhs = -DVector::from_column_slice(g);
    Some(chol.solve(&rhs).iter().copied().collect())
}

/// Newton iterations in the orthant of `x0`. Pendants are set to their
/// exact optimum; splits that shrink below `eps` are contracted.
pub fn newton_local(p: &FrechetProblem, x0: &TreePoint, tol: &Tolerances) -> Result<(TreePoint, SolveTrace)> {
    p.labels().check_same(x0.labels())?;
    let mut x = TreePoint::from_parts(*p.labels(), x0.splits().to_vec(), x0.lengths().to_vec(), p.pendant_means())
        .contract_small_edges(tol.eps);
    let mut trace = SolveTrace::new(None);
    let mut f = frechet_value(&x, p)?;
    trace.push(0, StepKind::Start, f, &x);
    for it in 1..=tol.max_newton_iter {
        let paths = p.paths(&x)?;
        let g = gradient_from_paths(&x, p, &paths).interior;
        if g.iter().all(|v| v.abs() < tol.delta) {
            trace.termination = Termination::Converged;
            return Ok((x, trace));
        }
        let h = hessian_from_paths(&x, p, &paths, true);
        drop(paths);
        let (dir, kind) = match newton_direction(h, &g) {
            Some(d) if dot(&d, &g) < 0.0 => (d, StepKind::Newton),
            _ => (g.iter().map(|v| -v).collect::<Vec<_>>(), StepKind::Gradient),
        };
        let slope = dot(&dir, &g);
        let lens = x.lengths().to_vec();
        let alpha_max = lens
            .iter()
            .zip(&dir)
            .filter(|(_, d)| **d < 0.0)
            .map(|(l, d)| -l / d)
            .fold(f64::INFINITY, f64::min);
        let alpha0 = if alpha_max <= 1.0 { tol.c0 * alpha_max } else { 1.0 };
        let trial = |alpha: f64| -> Result<(TreePoint, f64)> {
            let nl: Vec<f64> = lens.iter().zip(&dir).map(|(l, d)| (l + alpha * d).max(0.0)).collect();
            let y = x.with_lengths(&nl)?;
            let fy = frechet_value(&y, p)?;
            Ok((y, fy))
        };
        let mut alpha = alpha0;
        let mut accepted = None;
        while alpha > 1e-20 {
            let (y, fy) = trial(alpha)?;
            if fy <= f + tol.c1 * alpha * slope {
                accepted = Some((y, fy));
                break;
            }
            alpha *= 0.5;
        }
        let Some((mut y, mut fy)) = accepted else {
            trace.termination = Termination::Stalled;
            return Ok((x, trace));
        };
        // steepest-descent steps are often too short; lengthen while the
        // curvature condition says the slope is still steep
        if kind == StepKind::Gradient && alpha == alpha0 && alpha_max > 1.0 {
            let cap = if alpha_max.is_finite() { tol.c0 * alpha_max } else { f64::INFINITY };
            loop {
                let gy = gradient_from_paths(&y, p, &p.paths(&y)?).interior;
                if y.num_splits() != x.num_splits() || dot(&gy, &dir) >= tol.c2 * slope || 2.0 * alpha > cap {
                    break;
                }
                let (z, fz) = trial(2.0 * alpha)?;
                if fz > f + tol.c1 * 2.0 * alpha * slope || fz >= fy {
                    break;
                }
                alpha *= 2.0;
                y = z;
                fy = fz;
            }
        }
        let decrease = f - fy;
        x = y.contract_small_edges(tol.eps);
        f = if x.num_splits() == y.num_splits() { fy } else { frechet_value(&x, p)? };
        trace.push(it, kind, f, &x);
        if decrease <= 0.0 {
            trace.termination = Termination::Stalled;
            return Ok((x, trace));
        }
    }
    trace.termination = Termination::MaxIterations;
    Ok((x, trace))
}
