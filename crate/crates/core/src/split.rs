//! Labels, splits and topologies.
//!
//! Leaves are labelled `0..=r`. A split is stored by the side that does not
//! contain label 0, as a bitmask over bits `1..=r`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `r`; labels must fit in a `u64` mask.
pub const MAX_R: usize = 63;

/// Largest `r` for which all maximal topologies are enumerated.
pub const MAX_ENUMERATE_R: usize = 8;

/// The leaf label set `{0, 1, ..., r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelSet {
    r: usize,
}

impl LabelSet {
    pub fn new(r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidLabelSet(format!("need r >= 2, got {r}")));
        }
        if r > MAX_R {
            return Err(Error::Capacity(format!("r = {r} exceeds {MAX_R}")));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Mask of all nonzero labels.
    pub fn full_mask(&self) -> u64 {
        ((1u64 << self.r) - 1) << 1
    }

    /// Number of pendant coordinates (`r + 1`).
    pub fn num_pendants(&self) -> usize {
        self.r + 1
    }

    pub(crate) fn check_same(&self, other: &LabelSet) -> Result<()> {
        if self.r != other.r {
            return Err(Error::LabelMismatch(self.r, other.r));
        }
        Ok(())
    }
}

/// A nontrivial split, identified by its 0-free side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Split(u64);

impl Split {
    /// Build a split from the labels on the side away from 0.
    pub fn new(labels: &LabelSet, members: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &m in members {
            if m == 0 || m > labels.r() {
                return Err(Error::InvalidSplit(format!(
                    "label {m} outside 1..={}",
                    labels.r()
                )));
            }
            mask |= 1 << m;
        }
        Self::from_mask(labels, mask)
    }

    /// Build a split from a raw mask (bit `i` set for label `i`).
    pub fn from_mask(labels: &LabelSet, mask: u64) -> Result<Self> {
        if mask & !labels.full_mask() != 0 {
            return Err(Error::InvalidSplit(format!("mask {mask:#x} has labels outside 1..={}", labels.r())));
        }
        let k = mask.count_ones() as usize;
        if k < 2 || k > labels.r() - 1 {
            return Err(Error::InvalidSplit(format!(
                "side {} has {k} labels; need 2..={}",
                fmt_mask(mask),
                labels.r() - 1
            )));
        }
        Ok(Split(mask))
    }

    pub(crate) const fn raw(mask: u64) -> Self {
        Split(mask)
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn members(&self) -> Vec<usize> {
        bits(self.0).collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Two splits are compatible when their 0-free sides are nested or disjoint.
    #[inline]
    pub fn compatible(&self, other: &Split) -> bool {
        let (a, b) = (self.0, other.0);
        a & b == 0 || a & b == a || a & b == b
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_mask(self.0))
    }
}

fn fmt_mask(mask: u64) -> String {
    let parts: Vec<String> = bits(mask).map(|b| b.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// `compatible(s1, s2)` as a free function.
pub fn compatible(s1: &Split, s2: &Split) -> bool {
    s1.compatible(s2)
}

/// All nontrivial splits of `labels`, in mask order.
pub fn enumerate_splits(labels: &LabelSet) -> Result<Vec<Split>> {
    if labels.r() > 20 {
        return Err(Error::Capacity(format!("enumerating splits for r = {}", labels.r())));
    }
    let full = labels.full_mask();
    let mut out = Vec::new();
    let mut m = 0u64;
    // walk all submasks of `full` in increasing order
    loop {
        m = (m.wrapping_sub(full)) & full;
        if m == 0 {
            break;
        }
        let k = m.count_ones() as usize;
        if k >= 2 && k < labels.r() {
            out.push(Split(m));
        }
    }
    out.sort();
    Ok(out)
}

/// A set of pairwise compatible splits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    labels: LabelSet,
    splits: Vec<Split>,
}

impl Topology {
    pub fn new(labels: LabelSet, mut splits: Vec<Split>) -> Result<Self> {
        splits.sort();
        splits.dedup();
        for (i, a) in splits.iter().enumerate() {
            if a.mask() & !labels.full_mask() != 0 {
                return Err(Error::InvalidSplit(format!("{a} not over r = {}", labels.r())));
            }
            for b in &splits[i + 1..] {
                if !a.compatible(b) {
                    return Err(Error::Incompatible(a.to_string(), b.to_string()));
                }
            }
        }
        Ok(Self { labels, splits })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    pub fn contains(&self, s: &Split) -> bool {
        self.splits.binary_search(s).is_ok()
    }

    /// Maximal topologies have `r - 2` interior splits.
    pub fn is_maximal(&self) -> bool {
        self.splits.len() == self.labels.r() - 2
    }
}

/// Every maximal topology on `labels`; there are `(2r-3)!!` of them.
///
/// Built by inserting leaves one at a time into rooted binary trees on
/// `1..=k`, with label 0 acting as the root.
pub fn enumerate_maximal_topologies(labels: &LabelSet) -> Result<Vec<Topology>> {
    let r = labels.r();
    if r > MAX_ENUMERATE_R {
        return Err(Error::Capacity(format!(
            "enumeration limited to r <= {MAX_ENUMERATE_R}, got {r}"
        )));
    }
    // clades including singletons and the root clade
    let mut trees: Vec<Vec<u64>> = vec![vec![0b10, 0b100, 0b110]];
    for k in 3..=r {
        let leaf = 1u64 << k;
        let mut next = Vec::with_capacity(trees.len() * (2 * k - 3));
        for t in &trees {
            for &c in t {
                let mut nt: Vec<u64> = t
                    .iter()
                    .map(|&d| if d != c && d & c == c { d | leaf } else { d })
                    .collect();
                nt.push(c | leaf);
                nt.push(leaf);
                next.push(nt);
            }
        }
        trees = next;
    }
    let mut out: Vec<Topology> = trees
        .into_iter()
        .map(|t| {
            let mut splits: Vec<Split> = t
                .into_iter()
                .filter(|&m| {
                    let n = m.count_ones() as usize;
                    n >= 2 && n < r
                })
                .map(Split)
                .collect();
            splits.sort();
            Topology { labels: *labels, splits }
        })
        .collect();
    out.sort_by(|a, b| a.splits.cmp(&b.splits));
    Ok(out)
}

/// All maximal pairwise-compatible subsets of `candidates` (Bron-Kerbosch
/// with pivoting). Output is deterministic for a given input order.
pub fn maximal_compatible_sets(candidates: &[Split]) -> Vec<Vec<Split>> {
    let n = candidates.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && candidates[i].compatible(&candidates[j])).collect())
        .collect();
    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(&adj, &mut r, (0..n).collect(), Vec::new(), &mut |clique: &[usize]| {
        let mut s: Vec<Split> = clique.iter().map(|&i| candidates[i]).collect();
        s.sort();
        out.push(s);
    });
    out.sort();
    out
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    mut x: Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if p.is_empty() {
        if x.is_empty() {
            emit(r);
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .unwrap();
    let mut p_rest = p.clone();
    for v in p.iter().copied().filter(|&v| !adj[pivot][v]) {
        r.push(v);
        let np = p_rest.iter().copied().filter(|&u| adj[v][u]).collect();
        let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r, np, nx, emit);
        r.pop();
        p_rest.retain(|&u| u != v);
        x.push(v);
    }
}
