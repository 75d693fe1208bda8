//! Kernel smoothing of trees against a scalar predictor, and topological
//! summaries of ordered tree sequences.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frechet::{frechet_mean_with, newton_local, quadratic_start, FrechetProblem, Tolerances};
use crate::newick::{format_number, serialize_tree};
use crate::split::{LabelSet, Split, Topology};
use crate::tree::TreePoint;

/// Paired observations `(x_i, T_i)`.
#[derive(Debug, Clone)]
pub struct RegressionData {
    xs: Vec<f64>,
    trees: Vec<TreePoint>,
}

impl RegressionData {
    pub fn new(xs: Vec<f64>, trees: Vec<TreePoint>) -> Result<Self> {
        if xs.len() != trees.len() {
            return Err(Error::InvalidArgument(format!("{} predictors for {} trees", xs.len(), trees.len())));
        }
        let first = trees.first().ok_or_else(|| Error::InvalidArgument("no observations".into()))?;
        for t in &trees {
            first.labels().check_same(t.labels())?;
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("predictors must be finite".into()));
        }
        Ok(Self { xs, trees })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn trees(&self) -> &[TreePoint] {
        &self.trees
    }

    pub fn labels(&self) -> &LabelSet {
        self.trees[0].labels()
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

fn gaussian(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Normalized Gaussian kernel weights of `xs` around `x`.
pub fn kernel_weights(x: f64, xs: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth {h} must be positive")));
    }
    let k: Vec<f64> = xs.iter().map(|xi| gaussian((x - xi) / h)).collect();
    let s: f64 = k.iter().sum();
    if !(s > 0.0) {
        return Err(Error::DegenerateWindow(x));
    }
    Ok(k.into_iter().map(|v| v / s).collect())
}

fn shared_topology(trees: &[TreePoint]) -> bool {
    trees.windows(2).all(|w| w[0].splits() == w[1].splits())
}

fn fit_weighted(d: &RegressionData, w: Vec<f64>, start: Option<&TreePoint>, tol: &Tolerances) -> Result<(TreePoint, bool)> {
    let p = FrechetProblem::new(d.trees.clone(), Some(w))?;
    if shared_topology(&d.trees) {
        // one orthant: the weighted coordinate average is the mean
        let x0 = quadratic_start(&p, &d.trees[0].topology(), 0.0)?;
        let (x, trace) = newton_local(&p, &x0, tol)?;
        return Ok((x, trace.converged()));
    }
    let res = frechet_mean_with(&p, start, tol)?;
    let ok = res.trace.converged();
    Ok((res.mean, ok))
}

/// Kernel-weighted Frechet mean at `x`.
pub fn fit_point(x: f64, d: &RegressionData, h: f64, tol: &Tolerances) -> Result<TreePoint> {
    let w = kernel_weights(x, &d.xs, h)?;
    let (t, ok) = fit_weighted(d, w, None, tol)?;
    if !ok {
        return Err(Error::NonConvergence(format!("fit at x = {x}")));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub x: f64,
    pub message: String,
}

/// Fits of one bandwidth along a grid.
#[derive(Debug, Clone, Serialize)]
pub struct TreeSmooth {
    pub grid: Vec<f64>,
    /// `None` where the fit failed outright. Non-converged fits keep
    /// their best iterate and also appear in `failures`.
    pub fits: Vec<Option<TreePoint>>,
    pub h: f64,
    pub kernel: String,
    pub failures: Vec<PointFailure>,
}

impl TreeSmooth {
    /// One Newick line per grid point; failed points give an empty line.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        for f in &self.fits {
            if let Some(t) = f {
                out.push_str(&serialize_tree(t));
            }
            out.push('\n');
        }
        out
    }
}

/// Fit at every grid point, warm-starting each solve from the previous fit.
pub fn fit_smooth(d: &RegressionData, grid: &[f64], h: f64, tol: &Tolerances) -> Result<TreeSmooth> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth {h} must be positive")));
    }
    let mut fits: Vec<Option<TreePoint>> = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    let mut prev: Option<TreePoint> = None;
    for &x in grid {
        let fit = kernel_weights(x, &d.xs, h).and_then(|w| fit_weighted(d, w, prev.as_ref(), tol));
        match fit {
            Ok((t, ok)) => {
                if !ok {
                    failures.push(PointFailure { x, message: "solver did not converge".into() });
                }
                prev = Some(t.clone());
                fits.push(Some(t));
            }
            Err(e) => {
                log::warn!("fit at x = {x} failed: {e}");
                failures.push(PointFailure { x, message: e.to_string() });
                fits.push(None);
            }
        }
    }
    Ok(TreeSmooth { grid: grid.to_vec(), fits, h, kernel: "gaussian".into(), failures })
}

/// One smooth per bandwidth, fitted in parallel.
pub fn smooth_family(d: &RegressionData, grid: &[f64], hs: &[f64], tol: &Tolerances) -> Result<Vec<TreeSmooth>> {
    hs.par_iter().map(|&h| fit_smooth(d, grid, h, tol)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub x: f64,
    pub num_edges: Option<usize>,
    pub total_length: Option<f64>,
}

/// Interior-edge count and total interior length of each fit.
pub fn summarize(s: &TreeSmooth) -> Vec<SummaryRow> {
    s.grid
        .iter()
        .zip(&s.fits)
        .map(|(&x, f)| SummaryRow {
            x,
            num_edges: f.as_ref().map(|t| t.num_splits()),
            total_length: f.as_ref().map(|t| t.total_interior_length()),
        })
        .collect()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("x,num_edges,total_length\n");
    for r in rows {
        let n = r.num_edges.map(|n| n.to_string()).unwrap_or_default();
        let l = r.total_length.map(format_number).unwrap_or_default();
        out.push_str(&format!("{},{n},{l}\n", format_number(r.x)));
    }
    out
}

/// Trees `start..=end` (0-based) all refine to `topology`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub topology: Topology,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentativeSequence {
    pub blocks: Vec<Block>,
}

impl RepresentativeSequence {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Fewest consecutive blocks such that each block's split union is
/// pairwise compatible. Among optimal answers the last block is as long
/// as possible, recursively.
pub fn min_rep_sequence(trees: &[TreePoint]) -> Result<RepresentativeSequence> {
    let first = trees.first().ok_or_else(|| Error::InvalidArgument("no trees".into()))?;
    let labels = *first.labels();
    for t in trees {
        labels.check_same(t.labels())?;
    }
    let n = trees.len();
    let mut k = vec![usize::MAX; n + 1];
    let mut from = vec![0; n + 1];
    k[0] = 0;
    for i in 1..=n {
        let mut union: Vec<Split> = Vec::new();
        for j in (0..i).rev() {
            let mut ok = true;
            for s in trees[j].splits() {
                if union.contains(s) {
                    continue;
                }
                if union.iter().any(|u| !u.compatible(s)) {
                    ok = false;
                    break;
                }
                union.push(*s);
            }
            if !ok {
                break;
            }
            if k[j] < k[i] {
                k[i] = k[j] + 1;
                from[i] = j;
            }
        }
    }
    let mut blocks = Vec::with_capacity(k[n]);
    let mut i = n;
    while i > 0 {
        let j = from[i];
        let mut union: Vec<Split> = trees[j..i].iter().flat_map(|t| t.splits().iter().copied()).collect();
        union.sort();
        union.dedup();
        blocks.push(Block { topology: Topology::new(labels, union)?, start: j, end: i - 1 });
        i = j;
    }
    blocks.reverse();
    Ok(RepresentativeSequence { blocks })
}
