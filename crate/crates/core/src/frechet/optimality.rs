//! Approximate-optimality certificate.
//!
//! A point passes when the restricted gradient is small and the
//! directional derivative toward every extension orthant is not
//! significantly negative. The perpendicular part is convex and
//! positively homogeneous in the new-split weights, so each orthant is
//! searched on its unit simplex.

use serde::{Deserialize, Serialize};

use super::derivative::{gradient_from_paths, perpendicular_part};
use super::{FrechetProblem, Tolerances};
use crate::error::Result;
use crate::split::{maximal_compatible_sets, Split};
use crate::tree::{Direction, TreePoint};

/// Weight floor on the simplex, so every split of the orthant is present.
const SIMPLEX_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub tangent_ok: bool,
    pub normal_ok: bool,
    pub max_abs_gradient: f64,
    /// Smallest perpendicular derivative found; `None` at maximal points.
    pub min_normal_derivative: Option<f64>,
    #[serde(skip)]
    pub worst_direction: Option<Direction>,
    pub orthants_searched: usize,
    /// True when the orthant count exceeded the cap and some were skipped.
    pub pruned: bool,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.tangent_ok && self.normal_ok
    }
}

/// Splits that may enter from `x`: those of some data tree that are
/// compatible with `x` and not already in it. Other new splits can only
/// raise the perpendicular derivative.
pub(crate) fn candidate_splits(x: &TreePoint, p: &FrechetProblem) -> Vec<Split> {
    let mut c: Vec<Split> = p
        .data()
        .iter()
        .flat_map(|t| t.splits().iter().copied())
        .filter(|s| !x.contains(s) && x.is_compatible_with(s))
        .collect();
    c.sort();
    c.dedup();
    c
}

/// Euclidean projection onto `{q >= floor, sum q = 1}`.
fn project_simplex(v: &mut [f64], floor: f64) {
    let n = v.len();
    let mass = 1.0 - floor * n as f64;
    let mut u: Vec<f64> = v.iter().map(|x| x - floor).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - mass) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - floor - theta).max(0.0) + floor;
    }
}

fn minimize_on_simplex(x: &TreePoint, p: &FrechetProblem, splits: &[Split], start: Vec<f64>, iters: usize) -> (f64, Vec<f64>) {
    let eval = |q: &[f64], grad: Option<&mut [f64]>| {
        let qs: Vec<(Split, f64)> = splits.iter().copied().zip(q.iter().copied()).collect();
        perpendicular_part(x, p, &qs, grad)
    };
    let mut q = start;
    project_simplex(&mut q, SIMPLEX_FLOOR);
    let mut g = vec![0.0; q.len()];
    let mut f = eval(&q, Some(&mut g));
    let mut step = 1.0;
    for _ in 0..iters {
        let mut improved = false;
        for _ in 0..30 {
            let mut trial: Vec<f64> = q.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            project_simplex(&mut trial, SIMPLEX_FLOOR);
            let mut gt = vec![0.0; q.len()];
            let ft = eval(&trial, Some(&mut gt));
            if ft < f - 1e-15 {
                q = trial;
                f = ft;
                g = gt;
                improved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (f, q)
}

/// Smallest perpendicular derivative over unit-simplex directions built
/// from `cand`, with the minimizing weights.
pub(crate) struct NormalSearch {
    pub min: f64,
    pub q: Vec<(Split, f64)>,
    pub searched: usize,
    pub pruned: bool,
}

pub(crate) fn min_perpendicular(x: &TreePoint, p: &FrechetProblem, cand: &[Split], tol: &Tolerances) -> NormalSearch {
    let single: Vec<f64> = cand.iter().map(|s| perpendicular_part(x, p, &[(*s, 1.0)], None)).collect();
    let mut best = (f64::INFINITY, Vec::new());
    for (s, v) in cand.iter().zip(&single) {
        if *v < best.0 {
            best = (*v, vec![(*s, 1.0)]);
        }
    }
    let mut orthants = maximal_compatible_sets(cand);
    let pruned = orthants.len() > tol.orthant_cap;
    if pruned {
        orthants.retain(|o| o.iter().any(|s| single[cand.binary_search(s).unwrap()] < tol.delta));
    }
    let searched = orthants.len();
    for o in &orthants {
        if o.len() < 2 {
            continue;
        }
        let vals: Vec<f64> = o.iter().map(|s| single[cand.binary_search(s).unwrap()]).collect();
        let m = o.len();
        let k = (0..m).min_by(|a, b| vals[*a].total_cmp(&vals[*b])).unwrap();
        let mut vertex = vec![0.0; m];
        vertex[k] = 1.0;
        for st in [vec![1.0 / m as f64; m], vertex] {
            let (f, q) = minimize_on_simplex(x, p, o, st, tol.simplex_iters);
            if f < best.0 {
                best = (f, o.iter().copied().zip(q).collect());
            }
        }
    }
    NormalSearch { min: best.0, q: best.1, searched, pruned }
}

/// Check approximate optimality of `x`.
pub fn check_optimality(x: &TreePoint, p: &FrechetProblem, tol: &Tolerances) -> Result<OptimalityReport> {
    let paths = p.paths(x)?;
    let g = gradient_from_paths(x, p, &paths);
    drop(paths);
    let max_abs_gradient = g.max_abs();
    let tangent_ok = max_abs_gradient < tol.delta;

    let cand = candidate_splits(x, p);
    if cand.is_empty() {
        return Ok(OptimalityReport {
            tangent_ok,
            normal_ok: true,
            max_abs_gradient,
            min_normal_derivative: None,
            worst_direction: None,
            orthants_searched: 0,
            pruned: false,
        });
    }
    let search = min_perpendicular(x, p, &cand, tol);
    let worst_direction = if search.min < 0.0 { Some(Direction::normal_only(x, search.q)?) } else { None };
    Ok(OptimalityReport {
        tangent_ok,
        normal_ok: search.min >= -tol.delta,
        max_abs_gradient,
        min_normal_derivative: Some(search.min),
        worst_direction,
        orthants_searched: search.searched,
        pruned: search.pruned,
    })
}
