//! Proximal-point iterations: cyclic SPPA and the inductive mean.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{frechet_value, FrechetProblem, SolveTrace, StepKind};
use crate::error::{Error, Result};
use crate::geodesic::gtp_geodesic;
use crate::tree::TreePoint;

/// Minimizer of `d(X, T)^2 + alpha d(current, X)^2`: the point at
/// fraction `1 / (1 + alpha)` of the geodesic from `current` to `target`.
pub fn proximal_step(current: &TreePoint, target: &TreePoint, alpha: f64) -> Result<TreePoint> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be >= 0")));
    }
    gtp_geodesic(current, target)?.point_along(1.0 / (1.0 + alpha))
}

/// Resumable cyclic SPPA. Step `k` visits `order[k mod n]` and moves the
/// fraction `w_i / W_k` toward it, where `W_k` is the total weight visited
/// so far. With equal weights this is the `1/k` schedule.
#[derive(Debug, Clone)]
pub struct SppaStepper {
    order: Vec<usize>,
    visited_weight: f64,
    k: usize,
    current: TreePoint,
}

impl SppaStepper {
    pub fn new(p: &FrechetProblem, order: Vec<usize>, start: TreePoint) -> Result<Self> {
        let mut seen = vec![false; p.len()];
        for &i in &order {
            if i >= p.len() || seen[i] {
                return Err(Error::InvalidArgument("order must be a permutation of the data indices".into()));
            }
            seen[i] = true;
        }
        if order.len() != p.len() {
            return Err(Error::InvalidArgument("order must be a permutation of the data indices".into()));
        }
        Ok(Self { order, visited_weight: 0.0, k: 0, current: start })
    }

    pub fn steps_taken(&self) -> usize {
        self.k
    }

    pub fn current(&self) -> &TreePoint {
        &self.current
    }

    pub fn step(&mut self, p: &FrechetProblem) -> Result<()> {
        let i = self.order[self.k % self.order.len()];
        let w = p.weights()[i];
        self.k += 1;
        if w == 0.0 {
            return Ok(());
        }
        self.visited_weight += w;
        let t = w / self.visited_weight;
        self.current = gtp_geodesic(&self.current, &p.data()[i])?.point_along(t.min(1.0))?;
        Ok(())
    }

    pub fn run(&mut self, p: &FrechetProblem, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(p)?;
        }
        Ok(())
    }
}

fn is_checkpoint(k: usize) -> bool {
    k.is_power_of_two()
}

/// Cyclic SPPA for `sweeps` passes over the data in the given order.
pub fn cyclic_sppa(p: &FrechetProblem, order: &[usize], sweeps: usize) -> Result<(TreePoint, SolveTrace)> {
    let start = p.data()[*order.first().ok_or_else(|| Error::InvalidArgument("empty order".into()))?].clone();
    let mut s = SppaStepper::new(p, order.to_vec(), start)?;
    let mut trace = SolveTrace::new(None);
    let total = sweeps * p.len();
    for k in 1..=total {
        s.step(p)?;
        if is_checkpoint(k) || k == total {
            trace.push(k, StepKind::Sppa, frechet_value(s.current(), p)?, s.current());
        }
    }
    Ok((s.current, trace))
}

/// Inductive mean: `S_k` moves `1/k` of the way from `S_{k-1}`
/// toward a tree drawn from the weights.
pub fn inductive_mean(p: &FrechetProblem, steps: usize, seed: u64) -> Result<(TreePoint, SolveTrace)> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = WeightedIndex::new(p.weights()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut trace = SolveTrace::new(Some(seed));
    let mut s = p.data()[dist.sample(&mut rng)].clone();
    for k in 2..=steps {
        let y = &p.data()[dist.sample(&mut rng)];
        s = gtp_geodesic(&s, y)?.point_along(1.0 / k as f64)?;
        if is_checkpoint(k) || k == steps {
            trace.push(k, StepKind::Sppa, frechet_value(&s, p)?, &s);
        }
    }
    if steps == 1 {
        trace.push(1, StepKind::Sppa, frechet_value(&s, p)?, &s);
    }
    Ok((s, trace))
}
