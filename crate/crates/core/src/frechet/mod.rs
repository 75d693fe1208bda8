//! Weighted Frechet means.
//!
//! `F(X) = sum_i w_i d(X, T^i)^2` with weights normalized to sum to one.
//! Provides the value, restricted derivatives, directional derivatives,
//! an optimality certificate and three solvers: cyclic proximal point
//! (SPPA), the inductive mean, and a composite SPPA + Newton method.

mod derivative;
mod newton;
mod optimality;
mod solver;
mod sppa;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{gtp_geodesic, GeodesicPath};
use crate::split::LabelSet;
use crate::tree::TreePoint;

pub use derivative::{
    decompose_directional_derivative, directional_derivative, restricted_gradient, restricted_hessian, Decomposition,
    Gradient, Hessian,
};
pub use newton::{newton_local, quadratic_start};
pub use optimality::{check_optimality, OptimalityReport};
pub(crate) use derivative::perpendicular_part;
pub(crate) use optimality::{candidate_splits, min_perpendicular};
pub use solver::{frechet_mean, frechet_mean_with, MeanResult};
pub use sppa::{cyclic_sppa, inductive_mean, proximal_step, SppaStepper};

/// Solver tolerances and step constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Splits shorter than this are contracted.
    pub eps: f64,
    /// Gradient and normal-derivative tolerance for optimality.
    pub delta: f64,
    /// Outer-loop decrease threshold.
    pub decrease_tol: f64,
    /// Fraction of the distance to the orthant boundary taken by a blocked step.
    pub c0: f64,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant (used to lengthen gradient steps).
    pub c2: f64,
    /// SPPA steps per outer block; `None` means `20 n`.
    pub block_steps: Option<usize>,
    pub max_newton_iter: usize,
    pub max_outer: usize,
    /// Above this many extension orthants, orthants whose single-split
    /// derivatives are all nonnegative are skipped.
    pub orthant_cap: usize,
    /// Projected-gradient iterations per extension orthant.
    pub simplex_iters: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            delta: 1e-6,
            decrease_tol: 1e-10,
            c0: 0.9,
            c1: 1e-4,
            c2: 0.9,
            block_steps: None,
            max_newton_iter: 500,
            max_outer: 200,
            orthant_cap: 5000,
            simplex_iters: 50,
        }
    }
}

/// Data trees with probability weights.
#[derive(Debug, Clone)]
pub struct FrechetProblem {
    labels: LabelSet,
    data: Vec<TreePoint>,
    weights: Vec<f64>,
}

impl FrechetProblem {
    /// Nonnegative weights are rescaled to sum to one; `None` means uniform.
    pub fn new(data: Vec<TreePoint>, weights: Option<Vec<f64>>) -> Result<Self> {
        let first = data.first().ok_or_else(|| Error::InvalidArgument("no data trees".into()))?;
        let labels = *first.labels();
        for t in &data {
            labels.check_same(t.labels())?;
        }
        let n = data.len();
        let weights = match weights {
            None => vec![1.0 / n as f64; n],
            Some(w) => {
                if w.len() != n {
                    return Err(Error::InvalidArgument(format!("{} weights for {n} trees", w.len())));
                }
                if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(Error::InvalidArgument("weights must be finite and >= 0".into()));
                }
                let s: f64 = w.iter().sum();
                if !(s > 0.0) {
                    return Err(Error::InvalidArgument("weights sum to zero".into()));
                }
                w.into_iter().map(|x| x / s).collect()
            }
        };
        Ok(Self { labels, data, weights })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn data(&self) -> &[TreePoint] {
        &self.data
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub(crate) fn paths<'a>(&'a self, x: &'a TreePoint) -> Result<Vec<GeodesicPath<'a>>> {
        self.labels.check_same(x.labels())?;
        self.data.iter().map(|t| gtp_geodesic(x, t)).collect()
    }

    /// Weighted mean of each pendant coordinate; the exact pendant optimum.
    pub fn pendant_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.labels.num_pendants()];
        for (t, w) in self.data.iter().zip(&self.weights) {
            for (mi, p) in m.iter_mut().zip(t.pendants()) {
                *mi += w * p;
            }
        }
        m
    }
}

/// `F(X)`.
pub fn frechet_value(x: &TreePoint, p: &FrechetProblem) -> Result<f64> {
    let mut f = 0.0;
    for (path, w) in p.paths(x)?.iter().zip(p.weights()) {
        f += w * path.distance().powi(2);
    }
    Ok(f)
}

/// How a solver run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    StepLimit,
    MaxIterations,
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Start,
    Sppa,
    Newton,
    Gradient,
    NormalDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub kind: StepKind,
    pub value: f64,
    pub num_splits: usize,
}

/// Per-step record of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
    pub seed: Option<u64>,
}

impl SolveTrace {
    pub(crate) fn new(seed: Option<u64>) -> Self {
        Self { records: Vec::new(), termination: Termination::StepLimit, seed }
    }

    pub(crate) fn push(&mut self, iteration: usize, kind: StepKind, value: f64, x: &TreePoint) {
        self.records.push(TraceRecord { iteration, kind, value, num_splits: x.num_splits() });
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn final_value(&self) -> Option<f64> {
        self.records.last().map(|r| r.value)
    }
}
