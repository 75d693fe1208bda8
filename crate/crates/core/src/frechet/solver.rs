//! Composite solver: blocks of cyclic SPPA steps, each followed by Newton
//! in the orthant the SPPA iterate reached.

use serde::Serialize;

use super::newton::{newton_local, quadratic_start};
use super::optimality::{check_optimality, OptimalityReport};
use super::sppa::SppaStepper;
use super::{directional_derivative, frechet_value, FrechetProblem, SolveTrace, StepKind, Termination, Tolerances};
use crate::error::Result;
use crate::tree::{Direction, TreePoint};

#[derive(Debug, Clone, Serialize)]
pub struct MeanResult {
    pub mean: TreePoint,
    pub value: f64,
    pub trace: SolveTrace,
    pub report: OptimalityReport,
}

/// Frechet mean with default tolerances.
pub fn frechet_mean(p: &FrechetProblem) -> Result<MeanResult> {
    frechet_mean_with(p, None, &Tolerances::default())
}

/// Line search along a perpendicular descent direction, then Newton in
/// the enlarged orthant.
fn normal_descent(x: &TreePoint, fx: f64, dir: &Direction, p: &FrechetProblem, tol: &Tolerances) -> Result<Option<(TreePoint, f64)>> {
    let slope = directional_derivative(x, dir, p)?;
    if slope >= 0.0 {
        return Ok(None);
    }
    let qq: f64 = dir.normal().iter().map(|(_, q)| q * q).sum();
    let mut alpha = -slope / (2.0 * qq);
    for _ in 0..60 {
        let y = x.step(dir, alpha)?;
        let fy = frechet_value(&y, p)?;
        if fy <= fx + tol.c1 * alpha * slope {
            let (z, _) = newton_local(p, &y, tol)?;
            let fz = frechet_value(&z, p)?;
            return Ok(Some(if fz < fy { (z, fz) } else { (y, fy) }));
        }
        alpha *= 0.5;
    }
    Ok(None)
}

/// Composite SPPA + Newton solver with an optional warm start.
pub fn frechet_mean_with(p: &FrechetProblem, start: Option<&TreePoint>, tol: &Tolerances) -> Result<MeanResult> {
    let x0 = match start {
        Some(s) => s.clone(),
        None => {
            // the data tree with the smallest F supplies the first orthant
            let mut best = (f64::INFINITY, 0);
            for (i, t) in p.data().iter().enumerate() {
                let f = frechet_value(t, p)?;
                if f < best.0 {
                    best = (f, i);
                }
            }
            quadratic_start(p, &p.data()[best.1].topology(), tol.eps)?
        }
    };
    let mut trace = SolveTrace::new(None);
    let (mut x, _) = newton_local(p, &x0, tol)?;
    let mut fx = frechet_value(&x, p)?;
    trace.push(0, StepKind::Newton, fx, &x);

    let block = tol.block_steps.unwrap_or(20 * p.len()).max(1);
    let mut sppa = SppaStepper::new(p, (0..p.len()).collect(), x.clone())?;
    let mut report = check_optimality(&x, p, tol)?;
    for outer in 1..=tol.max_outer {
        let f_prev = fx;
        if let Some(dir) = report.worst_direction.clone().filter(|_| !report.normal_ok) {
            if let Some((y, fy)) = normal_descent(&x, fx, &dir, p, tol)? {
                if fy < fx {
                    x = y;
                    fx = fy;
                    trace.push(outer, StepKind::NormalDescent, fx, &x);
                }
            }
        }
        sppa.run(p, block)?;
        trace.push(outer, StepKind::Sppa, frechet_value(sppa.current(), p)?, sppa.current());
        let (y, _) = newton_local(p, &sppa.current().contract_small_edges(tol.eps), tol)?;
        let fy = frechet_value(&y, p)?;
        if fy < fx {
            x = y;
            fx = fy;
            trace.push(outer, StepKind::Newton, fx, &x);
        }
        let passed_before = report.passed();
        report = check_optimality(&x, p, tol)?;
        if report.passed() && passed_before && f_prev - fx <= tol.decrease_tol {
            trace.termination = Termination::Converged;
            return Ok(MeanResult { mean: x, value: fx, trace, report });
        }
    }
    trace.termination = Termination::MaxIterations;
    Ok(MeanResult { mean: x, value: fx, trace, report })
}
