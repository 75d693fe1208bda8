//! Stickiness of Frechet means.
//!
//! Trees on four leaves (`r = 3`) form an open book: the spine of star
//! trees with three pages glued on, one per interior split. Page `j`
//! carries split `{1,2}`, `{1,3}` or `{2,3}` for `j = 1, 2, 3`. The signed
//! first moment of each page decides whether the mean sticks to the spine.
//! For general trees the same question is answered by perpendicular
//! directional derivatives at the mean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frechet::{candidate_splits, min_perpendicular, perpendicular_part, FrechetProblem, Tolerances};
use crate::newick::format_number;
use crate::split::{enumerate_splits, LabelSet, Split};
use crate::tree::TreePoint;

/// Tolerance band around zero used by [`classify_t3`].
pub const MOMENT_TOL: f64 = 1e-12;

const PAGE_MASKS: [u64; 3] = [0b0110, 0b1010, 0b1100];

fn t3_labels() -> LabelSet {
    LabelSet::new(3).expect("r = 3 is valid")
}

/// Interior split carried by page `j` in `1..=3`.
pub fn page_split(j: usize) -> Result<Split> {
    if !(1..=3).contains(&j) {
        return Err(Error::InvalidArgument(format!("page {j} is not in 1..=3")));
    }
    Ok(Split::raw(PAGE_MASKS[j - 1]))
}

/// One tree on four leaves: page 0 is the spine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T3Point {
    pub page: usize,
    pub length: f64,
    pub pendants: [f64; 4],
}

impl T3Point {
    pub fn new(page: usize, length: f64, pendants: [f64; 4]) -> Result<Self> {
        if page > 3 {
            return Err(Error::InvalidArgument(format!("page {page} is not in 0..=3")));
        }
        if page == 0 && length != 0.0 {
            return Err(Error::InvalidArgument("spine points have interior length 0".into()));
        }
        if page > 0 && !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!("page {page} needs a positive length, got {length}")));
        }
        if pendants.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidArgument("pendant lengths must be finite and >= 0".into()));
        }
        Ok(Self { page, length, pendants })
    }

    pub fn to_tree(&self) -> TreePoint {
        let (splits, lengths) = match self.page {
            0 => (vec![], vec![]),
            j => (vec![Split::raw(PAGE_MASKS[j - 1])], vec![self.length]),
        };
        TreePoint::from_parts(t3_labels(), splits, lengths, self.pendants.to_vec())
    }

    pub fn from_tree(t: &TreePoint) -> Result<Self> {
        if t.labels().r() != 3 {
            return Err(Error::LabelMismatch(t.labels().r(), 3));
        }
        let p = t.pendants();
        let pendants = [p[0], p[1], p[2], p[3]];
        match t.splits() {
            [] => Self::new(0, 0.0, pendants),
            [s] => {
                let page = PAGE_MASKS.iter().position(|m| *m == s.mask()).expect("r = 3 has three splits") + 1;
                Self::new(page, t.lengths()[0], pendants)
            }
            _ => Err(Error::InvalidTree("a tree on four leaves has at most one interior split".into())),
        }
    }
}

/// Finite sample on the open book, weighted uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T3Sample {
    points: Vec<T3Point>,
}

impl T3Sample {
    pub fn new(points: Vec<T3Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty sample".into()));
        }
        Ok(Self { points })
    }

    /// `(page, length)` pairs with zero pendants.
    pub fn from_pages(pages: &[(usize, f64)]) -> Result<Self> {
        Self::new(pages.iter().map(|&(j, l)| T3Point::new(j, l, [0.0; 4])).collect::<Result<_>>()?)
    }

    pub fn from_trees(trees: &[TreePoint]) -> Result<Self> {
        Self::new(trees.iter().map(T3Point::from_tree).collect::<Result<_>>()?)
    }

    /// Parse lines `page length [p0 p1 p2 p3]`, separated by commas or
    /// whitespace. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::InvalidArgument(format!("line {}: {m}", ln + 1));
            let f: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if f.len() != 2 && f.len() != 6 {
                return Err(bad("expected `page length` optionally followed by four pendants"));
            }
            let page: usize = f[0].parse().map_err(|_| bad("bad page index"))?;
            let nums: Vec<f64> = f[1..].iter().map(|s| s.parse::<f64>().map_err(|_| bad("bad number"))).collect::<Result<_>>()?;
            let mut pendants = [0.0; 4];
            if nums.len() == 5 {
                pendants.copy_from_slice(&nums[1..]);
            }
            points.push(T3Point::new(page, nums[0], pendants).map_err(|e| bad(&e.to_string()))?);
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[T3Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_trees(&self) -> Vec<TreePoint> {
        self.points.iter().map(T3Point::to_tree).collect()
    }

    pub fn to_problem(&self) -> Result<FrechetProblem> {
        FrechetProblem::new(self.to_trees(), None)
    }
}

fn moments_of<'a>(points: impl Iterator<Item = &'a T3Point>) -> [f64; 3] {
    let mut per_page = [0.0; 4];
    let mut n = 0usize;
    for p in points {
        per_page[p.page] += p.length;
        n += 1;
    }
    let total: f64 = per_page[1..].iter().sum();
    let mut m = [0.0; 3];
    for j in 0..3 {
        m[j] = (2.0 * per_page[j + 1] - total) / n as f64;
    }
    m
}

/// `m_j`: mean of the length on page `j` minus lengths on the other pages.
pub fn page_moments(s: &T3Sample) -> [f64; 3] {
    moments_of(s.points.iter())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StickinessKind {
    Sticky,
    PartlySticky,
    NonSticky,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Moments([f64; 3]),
    /// Perpendicular direction (weights on new splits summing to one)
    /// with the smallest derivative found.
    Direction { splits: Vec<(Split, f64)>, derivative: f64 },
    /// The mean has a maximal topology.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickinessVerdict {
    pub kind: StickinessKind,
    pub witness: Witness,
}

/// Classify with the default band [`MOMENT_TOL`].
pub fn classify_t3(s: &T3Sample) -> StickinessVerdict {
    classify_t3_with(s, MOMENT_TOL)
}

/// Sticky if every moment is below `-tol`, non-sticky if one exceeds `tol`.
pub fn classify_t3_with(s: &T3Sample, tol: f64) -> StickinessVerdict {
    let m = page_moments(s);
    let top = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let kind = if top > tol {
        StickinessKind::NonSticky
    } else if top < -tol {
        StickinessKind::Sticky
    } else {
        StickinessKind::PartlySticky
    };
    StickinessVerdict { kind, witness: Witness::Moments(m) }
}

/// Exact mean: pendants average, and the interior edge sits on the page
/// with positive moment (length = that moment) or collapses to the spine.
pub fn t3_mean(s: &T3Sample) -> TreePoint {
    let n = s.len() as f64;
    let mut pendants = [0.0; 4];
    for p in &s.points {
        for (a, b) in pendants.iter_mut().zip(&p.pendants) {
            *a += b / n;
        }
    }
    let m = page_moments(s);
    match (0..3).find(|&j| m[j] > 0.0) {
        Some(j) => T3Point { page: j + 1, length: m[j], pendants }.to_tree(),
        None => T3Point { page: 0, length: 0.0, pendants }.to_tree(),
    }
}

/// Stickiness of a solved mean from its perpendicular directional
/// derivatives. A clearly negative minimum means `mean` is not optimal.
pub fn perpendicular_diagnostic(mean: &TreePoint, p: &FrechetProblem, tol: f64) -> Result<StickinessVerdict> {
    let perp: Vec<Split> = enumerate_splits(mean.labels())?
        .into_iter()
        .filter(|s| !mean.contains(s) && mean.is_compatible_with(s))
        .collect();
    if perp.is_empty() {
        return Ok(StickinessVerdict { kind: StickinessKind::NonSticky, witness: Witness::None });
    }
    let data = candidate_splits(mean, p);
    let (mut min, mut dir) = (f64::INFINITY, Vec::new());
    if !data.is_empty() {
        let search = min_perpendicular(mean, p, &data, &Tolerances::default());
        (min, dir) = (search.min, search.q);
    }
    // splits outside the data never lower the derivative of a mixture,
    // so single splits suffice for them
    for s in perp.iter().filter(|s| data.binary_search(s).is_err()) {
        let v = perpendicular_part(mean, p, &[(*s, 1.0)], None);
        if v < min {
            (min, dir) = (v, vec![(*s, 1.0)]);
        }
    }
    if min < -tol {
        return Err(Error::Inconsistent(format!("perpendicular derivative {min:e} < 0: the tree is not the mean")));
    }
    let kind = if min > tol { StickinessKind::Sticky } else { StickinessKind::PartlySticky };
    Ok(StickinessVerdict { kind, witness: Witness::Direction { splits: dir, derivative: min } })
}

/// Stick times from repeated sampling with replacement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StickTimes {
    pub max_n: usize,
    /// Page of the population mean (0 is the spine).
    pub target_page: usize,
    /// Per replicate: smallest `N` with the sample mean on the target page
    /// for every `n` in `N..=max_n`, or `None` if it is off at `max_n`.
    pub times: Vec<Option<usize>>,
}

impl StickTimes {
    /// Fraction of replicates whose stick time is at most `n`.
    pub fn fraction_stuck(&self, n: usize) -> f64 {
        self.times.iter().filter(|t| matches!(t, Some(k) if *k <= n)).count() as f64 / self.times.len() as f64
    }

    /// `n,fraction_stuck` for `n = 1..=max_n`.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("n,fraction_stuck\n");
        for n in 1..=self.max_n {
            out.push_str(&format!("{n},{}\n", format_number(self.fraction_stuck(n))));
        }
        out
    }
}

fn mean_page(m: &[f64; 3]) -> usize {
    (0..3).find(|&j| m[j] > 0.0).map_or(0, |j| j + 1)
}

/// Monte Carlo stick times. Replicate `k` uses its own stream of a
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn stick_time_experiment(population: &T3Sample, max_n: usize, reps: usize, seed: u64) -> Result<StickTimes> {
    if max_n == 0 || reps == 0 {
        return Err(Error::InvalidArgument("max_n and reps must be >= 1".into()));
    }
    let target_page = mean_page(&page_moments(population));
    let pts = &population.points;
    let times = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            let mut per_page = [0.0; 4];
            let mut last_off = 0;
            for n in 1..=max_n {
                let p = &pts[rng.gen_range(0..pts.len())];
                per_page[p.page] += p.length;
                let total: f64 = per_page[1..].iter().sum();
                let m = [0, 1, 2].map(|j| (2.0 * per_page[j + 1] - total) / n as f64);
                if mean_page(&m) != target_page {
                    last_off = n;
                }
            }
            (last_off < max_n).then_some(last_off + 1)
        })
        .collect();
    Ok(StickTimes { max_n, target_page, times })
}
