//! Random trees for tests, examples and simulations.

use rand::Rng;

use crate::split::{LabelSet, Split, Topology};
use crate::tree::TreePoint;

/// Knobs for [`random_tree`].
#[derive(Debug, Clone, Copy)]
pub struct RandomTreeOptions {
    /// Probability of contracting each interior split.
    pub drop_prob: f64,
    /// Interior lengths are uniform on `[min_len, max_len)`.
    pub min_len: f64,
    pub max_len: f64,
    /// Pendant lengths are uniform on `[0, pendant_max)`; 0 gives zeros.
    pub pendant_max: f64,
}

impl Default for RandomTreeOptions {
    fn default() -> Self {
        Self { drop_prob: 0.2, min_len: 0.1, max_len: 2.0, pendant_max: 1.0 }
    }
}

/// Uniformly random maximal topology (random leaf insertion).
pub fn random_topology<R: Rng + ?Sized>(labels: &LabelSet, rng: &mut R) -> Topology {
    let r = labels.r();
    let mut clades: Vec<u64> = vec![0b10, 0b100, 0b110];
    for k in 3..=r {
        let leaf = 1u64 << k;
        let c = clades[rng.gen_range(0..clades.len())];
        for d in clades.iter_mut() {
            if *d != c && *d & c == c {
                *d |= leaf;
            }
        }
        clades.push(c | leaf);
        clades.push(leaf);
    }
    let splits = clades
        .into_iter()
        .filter(|m| {
            let n = m.count_ones() as usize;
            n >= 2 && n < r
        })
        .map(Split::raw)
        .collect();
    Topology::new(*labels, splits).expect("leaf insertion yields compatible splits")
}

/// Random tree: random maximal topology, some splits contracted, uniform lengths.
pub fn random_tree<R: Rng + ?Sized>(labels: &LabelSet, rng: &mut R, opts: &RandomTreeOptions) -> TreePoint {
    let topo = random_topology(labels, rng);
    let mut edges = Vec::new();
    for s in topo.splits() {
        if rng.gen::<f64>() >= opts.drop_prob {
            edges.push((*s, rng.gen_range(opts.min_len..opts.max_len)));
        }
    }
    let pendants = (0..labels.num_pendants())
        .map(|_| if opts.pendant_max > 0.0 { rng.gen_range(0.0..opts.pendant_max) } else { 0.0 })
        .collect();
    TreePoint::from_unsorted(*labels, edges, pendants)
}

/// `n` random trees.
pub fn random_trees<R: Rng + ?Sized>(labels: &LabelSet, n: usize, rng: &mut R, opts: &RandomTreeOptions) -> Vec<TreePoint> {
    (0..n).map(|_| random_tree(labels, rng, opts)).collect()
}

/// Trees clustered around one random topology: each tree keeps that
/// topology with probability `concentration`, otherwise it is drawn fresh.
pub fn clustered_trees<R: Rng + ?Sized>(
    labels: &LabelSet,
    n: usize,
    concentration: f64,
    rng: &mut R,
    opts: &RandomTreeOptions,
) -> Vec<TreePoint> {
    let base = random_topology(labels, rng);
    (0..n)
        .map(|_| {
            if rng.gen::<f64>() < concentration {
                let edges = base.splits().iter().map(|s| (*s, rng.gen_range(opts.min_len..opts.max_len))).collect();
                let pendants = (0..labels.num_pendants())
                    .map(|_| if opts.pendant_max > 0.0 { rng.gen_range(0.0..opts.pendant_max) } else { 0.0 })
                    .collect();
                TreePoint::from_unsorted(*labels, edges, pendants)
            } else {
                random_tree(labels, rng, opts)
            }
        })
        .collect()
}
