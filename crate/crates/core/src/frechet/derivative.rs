//! Gradient, Hessian and directional derivatives of the Frechet function.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::FrechetProblem;
use crate::error::{Error, Result};
use crate::geodesic::{gtp_pairs, GeodesicPath};
use crate::split::Split;
use crate::tree::{Direction, TreePoint};

/// Gradient restricted to the orthant of `X`: one entry per split of `X`
/// plus one per pendant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub splits: Vec<Split>,
    pub interior: Vec<f64>,
    pub pendants: Vec<f64>,
}

impl Gradient {
    pub fn max_abs(&self) -> f64 {
        self.interior.iter().chain(&self.pendants).fold(0.0, |m, g| m.max(g.abs()))
    }
}

/// Hessian over the splits of `X`. The pendant block is `2 I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessian {
    pub splits: Vec<Split>,
    pub matrix: DMatrix<f64>,
}

pub(crate) fn gradient_from_paths(x: &TreePoint, p: &FrechetProblem, paths: &[GeodesicPath<'_>]) -> Gradient {
    let mut g = vec![0.0; x.num_splits()];
    let mut gp = vec![0.0; x.labels().num_pendants()];
    for ((path, w), t) in paths.iter().zip(p.weights()).zip(p.data()) {
        let sup = path.support();
        for pair in &sup.pairs {
            let f = 2.0 * w * (1.0 + pair.b_norm / pair.a_norm);
            for e in &pair.a {
                let i = x.index_of(e).expect("A splits belong to X");
                g[i] += f * x.lengths()[i];
            }
        }
        for e in &sup.common {
            if let Some(i) = x.index_of(e) {
                g[i] += 2.0 * w * (x.lengths()[i] - t.length(e));
            }
        }
        for (k, (a, b)) in x.pendants().iter().zip(t.pendants()).enumerate() {
            gp[k] += 2.0 * w * (a - b);
        }
    }
    Gradient { splits: x.splits().to_vec(), interior: g, pendants: gp }
}

/// Gradient of `F` restricted to the orthant of `X`.
pub fn restricted_gradient(x: &TreePoint, p: &FrechetProblem) -> Result<Gradient> {
    let paths = p.paths(x)?;
    Ok(gradient_from_paths(x, p, &paths))
}

/// `guard_small` zeroes the mixed entries of pairs with tiny `|A_l|`.
pub(crate) fn hessian_from_paths(x: &TreePoint, p: &FrechetProblem, paths: &[GeodesicPath<'_>], guard_small: bool) -> DMatrix<f64> {
    let m = x.num_splits();
    let mut h = DMatrix::zeros(m, m);
    for (path, w) in paths.iter().zip(p.weights()) {
        let sup = path.support();
        for pair in &sup.pairs {
            let idx: Vec<usize> = pair.a.iter().map(|e| x.index_of(e).expect("A splits belong to X")).collect();
            if idx.len() == 1 {
                h[(idx[0], idx[0])] += 2.0 * w;
                continue;
            }
            let (a, b) = (pair.a_norm, pair.b_norm);
            let c = b / (a * a * a);
            let mixed = !(guard_small && a < 1e-6);
            for &i in &idx {
                let xi = x.lengths()[i];
                h[(i, i)] += 2.0 * w * (1.0 + b / a - c * xi * xi);
                if mixed {
                    for &j in &idx {
                        if j != i {
                            h[(i, j)] -= 2.0 * w * c * xi * x.lengths()[j];
                        }
                    }
                }
            }
        }
        for e in &sup.common {
            if let Some(i) = x.index_of(e) {
                h[(i, i)] += 2.0 * w;
            }
        }
    }
    h
}

/// Hessian of `F` restricted to the orthant of `X`.
pub fn restricted_hessian(x: &TreePoint, p: &FrechetProblem) -> Result<Hessian> {
    let paths = p.paths(x)?;
    Ok(Hessian { splits: x.splits().to_vec(), matrix: hessian_from_paths(x, p, &paths, false) })
}

/// One tree's perpendicular term (without the factor `2 w`) and its
/// gradient with respect to the entries of `q`.
///
/// Splits of `T` that cross some new split but no split of `X` pair up
/// with the new splits they cross; the pairing is itself a geodesic
/// support problem on those two edge sets.
pub(crate) fn perpendicular_tree(x: &TreePoint, t: &TreePoint, q: &[(Split, f64)], grad: Option<&mut [f64]>) -> f64 {
    let bt: Vec<usize> = (0..t.num_splits())
        .filter(|&j| {
            let s = t.splits()[j];
            q.iter().any(|(e, _)| !e.compatible(&s)) && x.is_compatible_with(&s)
        })
        .collect();
    let at: Vec<usize> = (0..q.len())
        .filter(|&k| bt.iter().any(|&j| !q[k].0.compatible(&t.splits()[j])))
        .collect();
    let mut value = 0.0;
    let mut grad = grad;
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|v| *v = 0.0);
    }
    if !at.is_empty() {
        let a_masks: Vec<Split> = at.iter().map(|&k| q[k].0).collect();
        let a_lens: Vec<f64> = at.iter().map(|&k| q[k].1).collect();
        let b_masks: Vec<Split> = bt.iter().map(|&j| t.splits()[j]).collect();
        let b_lens: Vec<f64> = bt.iter().map(|&j| t.lengths()[j]).collect();
        for (ai, bi) in gtp_pairs(&a_masks, &a_lens, &b_masks, &b_lens) {
            let an = ai.iter().map(|&i| a_lens[i] * a_lens[i]).sum::<f64>().sqrt();
            let bn = bi.iter().map(|&j| b_lens[j] * b_lens[j]).sum::<f64>().sqrt();
            value += an * bn;
            if let Some(g) = grad.as_deref_mut() {
                for &i in &ai {
                    g[at[i]] += bn * a_lens[i] / an;
                }
            }
        }
    }
    for (k, (e, qe)) in q.iter().enumerate() {
        let te = t.length(e);
        if te > 0.0 {
            value -= qe * te;
            if let Some(g) = grad.as_deref_mut() {
                g[k] -= te;
            }
        }
    }
    value
}

/// Perpendicular part of the directional derivative for new-split weights `q`.
pub(crate) fn perpendicular_part(x: &TreePoint, p: &FrechetProblem, q: &[(Split, f64)], mut grad: Option<&mut [f64]>) -> f64 {
    let mut total = 0.0;
    let mut scratch = vec![0.0; q.len()];
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|v| *v = 0.0);
    }
    for (t, w) in p.data().iter().zip(p.weights()) {
        let want = grad.is_some();
        total += 2.0 * w * perpendicular_tree(x, t, q, if want { Some(&mut scratch) } else { None });
        if let Some(g) = grad.as_deref_mut() {
            for (gi, si) in g.iter_mut().zip(&scratch) {
                *gi += 2.0 * w * si;
            }
        }
    }
    total
}

fn tangent_part(g: &Gradient, y: &Direction) -> f64 {
    let a: f64 = g.interior.iter().zip(y.tangent()).map(|(a, b)| a * b).sum();
    let b: f64 = g.pendants.iter().zip(y.tangent_pendants()).map(|(a, b)| a * b).sum();
    a + b
}

/// The directional derivative split into its tangent and perpendicular parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub total: f64,
    pub tangent: f64,
    pub perpendicular: f64,
}

/// `F'(X, Y)` with its two parts.
pub fn decompose_directional_derivative(x: &TreePoint, y: &Direction, p: &FrechetProblem) -> Result<Decomposition> {
    if !y.is_based_at(x) {
        return Err(Error::InvalidArgument("direction is based at a different topology".into()));
    }
    let g = restricted_gradient(x, p)?;
    let tangent = tangent_part(&g, y);
    let perpendicular = perpendicular_part(x, p, y.normal(), None);
    Ok(Decomposition { total: tangent + perpendicular, tangent, perpendicular })
}

/// `F'(X, Y)`, the one-sided derivative of `F(X + a Y)` at `a = 0`.
pub fn directional_derivative(x: &TreePoint, y: &Direction, p: &FrechetProblem) -> Result<f64> {
    Ok(decompose_directional_derivative(x, y, p)?.total)
}
