//! Points of treespace and directions at a point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::split::{LabelSet, Split, Topology};

/// A point of treespace: a topology with positive interior lengths plus
/// `r + 1` nonnegative pendant lengths (indexed by leaf label).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePoint {
    labels: LabelSet,
    splits: Vec<Split>,
    lengths: Vec<f64>,
    pendants: Vec<f64>,
}

impl TreePoint {
    /// Validating constructor. Edges are sorted by split; duplicates,
    /// incompatible pairs and nonpositive lengths are rejected.
    pub fn new(labels: LabelSet, edges: Vec<(Split, f64)>, pendants: Vec<f64>) -> Result<Self> {
        if pendants.len() != labels.num_pendants() {
            return Err(Error::InvalidTree(format!(
                "expected {} pendant lengths, got {}",
                labels.num_pendants(),
                pendants.len()
            )));
        }
        if let Some(p) = pendants.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidTree(format!("pendant length {p} must be finite and >= 0")));
        }
        let mut edges = edges;
        edges.sort_by(|a, b| a.0.cmp(&b.0));
        for w in edges.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidTree(format!("split {} listed twice", w[0].0)));
            }
        }
        for &(s, l) in &edges {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidTree(format!("interior length {l} on {s} must be > 0")));
            }
        }
        Topology::new(labels, edges.iter().map(|e| e.0).collect())?;
        let (splits, lengths) = edges.into_iter().unzip();
        Ok(Self { labels, splits, lengths, pendants })
    }

    /// Star tree (no interior splits).
    pub fn star(labels: LabelSet, pendants: Vec<f64>) -> Result<Self> {
        Self::new(labels, Vec::new(), pendants)
    }

    /// Unchecked constructor for internal use; `splits` must be sorted,
    /// compatible, with positive `lengths`.
    pub(crate) fn from_parts(labels: LabelSet, splits: Vec<Split>, lengths: Vec<f64>, pendants: Vec<f64>) -> Self {
        debug_assert!(splits.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(lengths.iter().all(|&l| l > 0.0));
        debug_assert_eq!(pendants.len(), labels.num_pendants());
        Self { labels, splits, lengths, pendants }
    }

    /// Build from possibly-unsorted parts, dropping nonpositive lengths.
    pub(crate) fn from_unsorted(labels: LabelSet, mut edges: Vec<(Split, f64)>, pendants: Vec<f64>) -> Self {
        edges.retain(|e| e.1 > 0.0);
        edges.sort_by(|a, b| a.0.cmp(&b.0));
        let (splits, lengths) = edges.into_iter().unzip();
        Self::from_parts(labels, splits, lengths, pendants)
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn pendants(&self) -> &[f64] {
        &self.pendants
    }

    pub fn edges(&self) -> impl Iterator<Item = (Split, f64)> + '_ {
        self.splits.iter().copied().zip(self.lengths.iter().copied())
    }

    pub fn topology(&self) -> Topology {
        Topology::new(self.labels, self.splits.clone()).expect("tree splits are compatible")
    }

    pub fn num_splits(&self) -> usize {
        self.splits.len()
    }

    pub fn index_of(&self, s: &Split) -> Option<usize> {
        self.splits.binary_search(s).ok()
    }

    /// Length of `s`, zero if absent.
    pub fn length(&self, s: &Split) -> f64 {
        self.index_of(s).map_or(0.0, |i| self.lengths[i])
    }

    pub fn contains(&self, s: &Split) -> bool {
        self.index_of(s).is_some()
    }

    /// True when `s` is compatible with every split of this tree.
    pub fn is_compatible_with(&self, s: &Split) -> bool {
        self.splits.iter().all(|t| t.compatible(s))
    }

    /// Sum of interior lengths.
    pub fn total_interior_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Drop interior splits shorter than `eps`.
    pub fn contract_small_edges(&self, eps: f64) -> TreePoint {
        let mut splits = Vec::with_capacity(self.splits.len());
        let mut lengths = Vec::with_capacity(self.splits.len());
        for (s, l) in self.edges() {
            if l >= eps {
                splits.push(s);
                lengths.push(l);
            }
        }
        Self::from_parts(self.labels, splits, lengths, self.pendants.clone())
    }

    /// Same topology and pendants, new interior lengths (zeros dropped).
    pub fn with_lengths(&self, lengths: &[f64]) -> Result<TreePoint> {
        if lengths.len() != self.splits.len() {
            return Err(Error::InvalidArgument("length vector size mismatch".into()));
        }
        if lengths.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidArgument("lengths must be finite and >= 0".into()));
        }
        let edges = self.splits.iter().copied().zip(lengths.iter().copied()).collect();
        Ok(Self::from_unsorted(self.labels, edges, self.pendants.clone()))
    }

    /// `X + alpha * Y` for a direction based at this point.
    ///
    /// Fails if a tangent coordinate would turn negative.
    pub fn step(&self, dir: &Direction, alpha: f64) -> Result<TreePoint> {
        if !dir.is_based_at(self) {
            return Err(Error::InvalidArgument("direction is based at a different topology".into()));
        }
        let mut edges = Vec::with_capacity(self.splits.len() + dir.normal.len());
        for (i, (s, l)) in self.edges().enumerate() {
            let v = l + alpha * dir.tangent[i];
            if v < -1e-14 * l.max(1.0) {
                return Err(Error::InvalidArgument(format!("step leaves the orthant on {s}")));
            }
            edges.push((s, v.max(0.0)));
        }
        for &(s, q) in &dir.normal {
            edges.push((s, alpha * q));
        }
        let mut pendants = self.pendants.clone();
        for (p, d) in pendants.iter_mut().zip(&dir.tangent_pendants) {
            *p += alpha * d;
            if *p < 0.0 {
                if *p < -1e-14 {
                    return Err(Error::InvalidArgument("step makes a pendant negative".into()));
                }
                *p = 0.0;
            }
        }
        Ok(Self::from_unsorted(self.labels, edges, pendants))
    }
}

/// A direction at a base point: a tangent part over the base's splits and
/// pendants, and a nonnegative part on new splits compatible with the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    base_splits: Vec<Split>,
    tangent: Vec<f64>,
    tangent_pendants: Vec<f64>,
    normal: Vec<(Split, f64)>,
}

impl Direction {
    pub fn new(base: &TreePoint, tangent: Vec<f64>, tangent_pendants: Vec<f64>, mut normal: Vec<(Split, f64)>) -> Result<Self> {
        if tangent.len() != base.num_splits() || tangent_pendants.len() != base.labels().num_pendants() {
            return Err(Error::InvalidArgument("tangent size does not match base".into()));
        }
        normal.retain(|e| e.1 != 0.0);
        normal.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, &(s, q)) in normal.iter().enumerate() {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::InvalidArgument(format!("normal weight {q} on {s} must be >= 0")));
            }
            if base.contains(&s) {
                return Err(Error::InvalidArgument(format!("{s} is already a split of the base")));
            }
            if !base.is_compatible_with(&s) {
                return Err(Error::InvalidArgument(format!("{s} is incompatible with the base")));
            }
            if s.mask() & !base.labels().full_mask() != 0 {
                return Err(Error::InvalidSplit(s.to_string()));
            }
            for (t, _) in &normal[i + 1..] {
                if !s.compatible(t) {
                    return Err(Error::Incompatible(s.to_string(), t.to_string()));
                }
                if *t == s {
                    return Err(Error::InvalidArgument(format!("{s} listed twice")));
                }
            }
        }
        Ok(Self { base_splits: base.splits().to_vec(), tangent, tangent_pendants, normal })
    }

    /// A purely perpendicular direction.
    pub fn normal_only(base: &TreePoint, normal: Vec<(Split, f64)>) -> Result<Self> {
        Self::new(
            base,
            vec![0.0; base.num_splits()],
            vec![0.0; base.labels().num_pendants()],
            normal,
        )
    }

    pub fn is_based_at(&self, x: &TreePoint) -> bool {
        self.base_splits == x.splits
    }

    pub fn tangent(&self) -> &[f64] {
        &self.tangent
    }

    pub fn tangent_pendants(&self) -> &[f64] {
        &self.tangent_pendants
    }

    pub fn normal(&self) -> &[(Split, f64)] {
        &self.normal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l4() -> LabelSet {
        LabelSet::new(4).unwrap()
    }

    #[test]
    fn constructor_validates() {
        let l = l4();
        let s12 = Split::new(&l, &[1, 2]).unwrap();
        let s13 = Split::new(&l, &[1, 3]).unwrap();
        assert!(TreePoint::new(l, vec![(s12, 1.0)], vec![0.0; 5]).is_ok());
        assert!(TreePoint::new(l, vec![(s12, 0.0)], vec![0.0; 5]).is_err());
        assert!(TreePoint::new(l, vec![(s12, 1.0)], vec![0.0; 4]).is_err());
        assert!(TreePoint::new(l, vec![(s12, 1.0)], vec![-1.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(TreePoint::new(l, vec![(s12, 1.0), (s13, 1.0)], vec![0.0; 5]).is_err());
        assert!(TreePoint::new(l, vec![(s12, 1.0), (s12, 2.0)], vec![0.0; 5]).is_err());
    }

    #[test]
    fn contraction_and_step() {
        let l = l4();
        let s12 = Split::new(&l, &[1, 2]).unwrap();
        let s123 = Split::new(&l, &[1, 2, 3]).unwrap();
        let s34 = Split::new(&l, &[3, 4]).unwrap();
        let x = TreePoint::new(l, vec![(s12, 1.0), (s123, 1e-10)], vec![1.0; 5]).unwrap();
        let c = x.contract_small_edges(1e-8);
        assert_eq!(c.splits(), &[s12]);

        let d = Direction::new(&c, vec![-0.5], vec![0.0; 5], vec![(s34, 2.0)]).unwrap();
        let y = c.step(&d, 1.0).unwrap();
        assert_eq!(y.length(&s12), 0.5);
        assert_eq!(y.length(&s34), 2.0);
        assert!(c.step(&d, 3.0).is_err());
        // new split must be compatible with the base
        let s13 = Split::new(&l, &[1, 3]).unwrap();
        assert!(Direction::normal_only(&c, vec![(s13, 1.0)]).is_err());
    }
}
