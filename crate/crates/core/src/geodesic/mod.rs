//! Geodesics between trees (GTP algorithm).
//!
//! The geodesic between `X` and `T` is described by a support sequence:
//! ordered pairs `(A_l, B_l)` where the `A_l` partition the splits of `X`
//! incompatible with `T` and the `B_l` partition those of `T` incompatible
//! with `X`. Everything else is a common coordinate that moves linearly.

mod cover;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::split::Split;
use crate::tree::TreePoint;

pub(crate) use cover::min_weight_cover;

/// Cover weights below `1 - COVER_TOL` trigger a split of the pair.
pub(crate) const COVER_TOL: f64 = 1e-10;

/// One pair of the support sequence with its norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPair {
    pub a: Vec<Split>,
    pub b: Vec<Split>,
    pub a_norm: f64,
    pub b_norm: f64,
}

impl SupportPair {
    /// `|A| / |B|`
    pub fn ratio(&self) -> f64 {
        self.a_norm / self.b_norm
    }
}

/// Support pairs plus the common interior splits (pendants are implicit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSequence {
    pub pairs: Vec<SupportPair>,
    pub common: Vec<Split>,
}

/// A geodesic with its endpoints and support.
#[derive(Debug, Clone)]
pub struct GeodesicPath<'a> {
    source: &'a TreePoint,
    target: &'a TreePoint,
    support: SupportSequence,
    distance: f64,
}

/// Index partition of two weighted edge sets into support pairs.
pub(crate) type IndexPairs = Vec<(Vec<usize>, Vec<usize>)>;

fn norm(lens: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| lens[i] * lens[i]).sum::<f64>().sqrt()
}

/// GTP on abstract weighted edge sets. Every `A` edge must be incompatible
/// with some `B` edge and vice versa. Returns the ordered pairs.
pub(crate) fn gtp_pairs(a_masks: &[Split], a_lens: &[f64], b_masks: &[Split], b_lens: &[f64]) -> IndexPairs {
    let mut pairs: IndexPairs = vec![((0..a_masks.len()).collect(), (0..b_masks.len()).collect())];
    let mut i = 0;
    while i < pairs.len() {
        match extend(&pairs[i], a_masks, a_lens, b_masks, b_lens) {
            Some((p1, p2)) => {
                pairs[i] = p1;
                pairs.insert(i + 1, p2);
            }
            None => i += 1,
        }
    }
    pairs
}

/// Solve the extension problem for one pair; `Some` when it splits.
fn extend(
    pair: &(Vec<usize>, Vec<usize>),
    a_masks: &[Split],
    a_lens: &[f64],
    b_masks: &[Split],
    b_lens: &[f64],
) -> Option<((Vec<usize>, Vec<usize>), (Vec<usize>, Vec<usize>))> {
    let (ai, bi) = pair;
    if ai.len() < 2 && bi.len() < 2 {
        return None;
    }
    let na = norm(a_lens, ai).powi(2);
    let nb = norm(b_lens, bi).powi(2);
    let wa: Vec<f64> = ai.iter().map(|&i| a_lens[i] * a_lens[i] / na).collect();
    let wb: Vec<f64> = bi.iter().map(|&j| b_lens[j] * b_lens[j] / nb).collect();
    let cover = min_weight_cover(&wa, &wb, |i, j| !a_masks[ai[i]].compatible(&b_masks[bi[j]]));
    if cover.value >= 1.0 - COVER_TOL {
        return None;
    }
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for (k, &i) in ai.iter().enumerate() {
        if cover.c1[k] {
            c1.push(i)
        } else {
            c2.push(i)
        }
    }
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for (k, &j) in bi.iter().enumerate() {
        if cover.d2[k] {
            d2.push(j)
        } else {
            d1.push(j)
        }
    }
    if c1.is_empty() || c2.is_empty() || d1.is_empty() || d2.is_empty() {
        return None;
    }
    Some(((c1, d1), (c2, d2)))
}

/// Split the interior edges of `x` and `t` into the incompatible sets and
/// the common splits.
pub(crate) fn partition(x: &TreePoint, t: &TreePoint) -> (Vec<usize>, Vec<usize>, Vec<Split>) {
    let xs = x.splits();
    let ts = t.splits();
    let a: Vec<usize> = (0..xs.len()).filter(|&i| ts.iter().any(|s| !s.compatible(&xs[i]))).collect();
    let b: Vec<usize> = (0..ts.len()).filter(|&j| xs.iter().any(|s| !s.compatible(&ts[j]))).collect();
    let mut common: Vec<Split> = Vec::with_capacity(xs.len() + ts.len());
    let (mut ia, mut ib) = (0, 0);
    for (i, s) in xs.iter().enumerate() {
        if ia < a.len() && a[ia] == i {
            ia += 1;
        } else {
            common.push(*s);
        }
    }
    for (j, s) in ts.iter().enumerate() {
        if ib < b.len() && b[ib] == j {
            ib += 1;
        } else {
            common.push(*s);
        }
    }
    common.sort();
    common.dedup();
    (a, b, common)
}

/// Geodesic between two trees over the same label set.
pub fn gtp_geodesic<'a>(x: &'a TreePoint, t: &'a TreePoint) -> Result<GeodesicPath<'a>> {
    x.labels().check_same(t.labels())?;
    let (a, b, common) = partition(x, t);
    let mut pairs = Vec::new();
    if !a.is_empty() {
        let a_masks: Vec<Split> = a.iter().map(|&i| x.splits()[i]).collect();
        let a_lens: Vec<f64> = a.iter().map(|&i| x.lengths()[i]).collect();
        let b_masks: Vec<Split> = b.iter().map(|&j| t.splits()[j]).collect();
        let b_lens: Vec<f64> = b.iter().map(|&j| t.lengths()[j]).collect();
        for (ai, bi) in gtp_pairs(&a_masks, &a_lens, &b_masks, &b_lens) {
            pairs.push(SupportPair {
                a_norm: norm(&a_lens, &ai),
                b_norm: norm(&b_lens, &bi),
                a: ai.iter().map(|&i| a_masks[i]).collect(),
                b: bi.iter().map(|&j| b_masks[j]).collect(),
            });
        }
    }
    let support = SupportSequence { pairs, common };
    let distance = distance_with_support(x, t, &support).sqrt();
    Ok(GeodesicPath { source: x, target: t, support, distance })
}

/// Squared length of the path described by `support`.
pub(crate) fn distance_with_support(x: &TreePoint, t: &TreePoint, support: &SupportSequence) -> f64 {
    // summed in sorted order so the reversed path gives the same bits
    let mut terms: Vec<f64> = support.pairs.iter().map(|p| (p.a_norm + p.b_norm).powi(2)).collect();
    terms.sort_by(f64::total_cmp);
    let mut d2: f64 = terms.iter().sum();
    for s in &support.common {
        d2 += (x.length(s) - t.length(s)).powi(2);
    }
    for (p, q) in x.pendants().iter().zip(t.pendants()) {
        d2 += (p - q).powi(2);
    }
    d2
}

/// Geodesic distance.
pub fn distance(x: &TreePoint, t: &TreePoint) -> Result<f64> {
    Ok(gtp_geodesic(x, t)?.distance)
}

impl<'a> GeodesicPath<'a> {
    pub fn source(&self) -> &'a TreePoint {
        self.source
    }

    pub fn target(&self) -> &'a TreePoint {
        self.target
    }

    pub fn support(&self) -> &SupportSequence {
        &self.support
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Number of leading pairs whose `B` side is present at `lambda`.
    pub fn leg(&self, lambda: f64) -> usize {
        self.support
            .pairs
            .iter()
            .take_while(|p| (1.0 - lambda) * p.a_norm - lambda * p.b_norm <= 0.0)
            .count()
    }

    /// The point at fraction `lambda` of the way from source to target.
    pub fn point_along(&self, lambda: f64) -> Result<TreePoint> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} outside [0, 1]")));
        }
        if lambda == 0.0 {
            return Ok(self.source.clone());
        }
        if lambda == 1.0 {
            return Ok(self.target.clone());
        }
        let (x, t) = (self.source, self.target);
        let mu = 1.0 - lambda;
        let mut edges: Vec<(Split, f64)> = Vec::with_capacity(x.num_splits() + t.num_splits());
        let leg = self.leg(lambda);
        for (j, p) in self.support.pairs.iter().enumerate() {
            let s = mu * p.a_norm - lambda * p.b_norm;
            if j < leg {
                let f = -s / p.b_norm;
                for e in &p.b {
                    edges.push((*e, f * t.length(e)));
                }
            } else if s > 0.0 {
                let f = s / p.a_norm;
                for e in &p.a {
                    edges.push((*e, f * x.length(e)));
                }
            }
        }
        for e in &self.support.common {
            edges.push((*e, mu * x.length(e) + lambda * t.length(e)));
        }
        let pendants = x.pendants().iter().zip(t.pendants()).map(|(p, q)| mu * p + lambda * q).collect();
        Ok(TreePoint::from_unsorted(*x.labels(), edges, pendants))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_tree;
    use crate::split::LabelSet;

    fn tr(s: &str, r: usize) -> TreePoint {
        parse_tree(s, &LabelSet::new(r).unwrap()).unwrap()
    }

    #[test]
    fn cone_path_through_star() {
        // {1,2} vs {1,3}, lengths 3 and 4: the cone distance is 3 + 4
        let x = tr("(0:0,(1:0,2:0):3,3:0,4:0);", 4);
        let t = tr("(0:0,(1:0,3:0):4,2:0,4:0);", 4);
        let g = gtp_geodesic(&x, &t).unwrap();
        assert!((g.distance() - 7.0).abs() < 1e-12);
        assert_eq!(g.support().pairs.len(), 1);
        let mid = g.point_along(3.0 / 7.0).unwrap();
        assert_eq!(mid.num_splits(), 0);
    }

    #[test]
    fn shared_split_is_common() {
        let x = tr("(0:0,((1:1,2:1):2,3:1):1,4:1);", 4);
        let t = tr("(0:0,((1:1,2:1):5,4:1):1,3:1);", 4);
        let g = gtp_geodesic(&x, &t).unwrap();
        assert_eq!(g.support().pairs.len(), 1);
        assert_eq!(g.support().common.len(), 1);
        let want = ((1.0f64 + 1.0).powi(2) + 9.0).sqrt();
        assert!((g.distance() - want).abs() < 1e-12);
    }

    #[test]
    fn compatible_trees_are_euclidean() {
        let x = tr("(0:1,(1:1,2:1):2,3:1,4:1);", 4);
        let t = tr("(0:1,1:1,2:1,(3:1,4:1):2);", 4);
        let d = distance(&x, &t).unwrap();
        assert!((d - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_bounds() {
        let x = tr("(0:0,(1:0,2:0):3,3:0,4:0);", 4);
        let t = tr("(0:0,(1:0,3:0):4,2:0,4:0);", 4);
        let g = gtp_geodesic(&x, &t).unwrap();
        assert_eq!(g.point_along(0.0).unwrap(), x);
        assert_eq!(g.point_along(1.0).unwrap(), t);
        assert!(g.point_along(1.5).is_err());
        let y = tr("(0:0,1:0,2:0,3:0);", 3);
        assert!(matches!(gtp_geodesic(&x, &y), Err(Error::LabelMismatch(4, 3))));
    }

    #[test]
    fn splits_into_two_pairs() {
        // caterpillar ((1,2),3) vs ((2,3),4) flavour with unequal weights
        let x = tr("(0:0,(((1:1,2:1):1,3:1):10,4:1):1,5:1);", 5);
        let t = tr("(0:0,1:1,((2:1,(3:1,4:1):10):1,5:1):1);", 5);
        let g = gtp_geodesic(&x, &t).unwrap();
        let pairs = &g.support().pairs;
        for w in pairs.windows(2) {
            assert!(w[0].ratio() <= w[1].ratio() + 1e-12);
        }
        let n = 201;
        let pts: Vec<TreePoint> = (0..n).map(|i| g.point_along(i as f64 / (n - 1) as f64).unwrap()).collect();
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += distance(&w[0], &w[1]).unwrap();
        }
        assert!((total - g.distance()).abs() < 1e-8);
    }
}
