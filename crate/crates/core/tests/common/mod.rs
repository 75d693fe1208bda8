//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treespace::random::{random_tree, RandomTreeOptions};
use treespace::{LabelSet, Split, TreePoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(r: usize) -> LabelSet {
    LabelSet::new(r).unwrap()
}

pub fn tree(l: &LabelSet, rng: &mut ChaCha8Rng) -> TreePoint {
    random_tree(l, rng, &RandomTreeOptions::default())
}

/// All ways to cut `n` items into `k` ordered nonempty blocks.
fn ordered_partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut blocks = vec![Vec::new(); k];
        for i in 0..n {
            blocks[c % k].push(i);
            c /= k;
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            out.push(blocks);
        }
    }
    out
}

fn norm(lens: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| lens[i] * lens[i]).sum::<f64>().sqrt()
}

/// Minimum normalized cover weight by exhaustive search over subsets.
pub fn brute_min_cover(a: &[Split], al: &[f64], b: &[Split], bl: &[f64]) -> f64 {
    let na: f64 = al.iter().map(|x| x * x).sum();
    let nb: f64 = bl.iter().map(|x| x * x).sum();
    let mut best = f64::INFINITY;
    for ma in 0u32..(1 << a.len()) {
        for mb in 0u32..(1 << b.len()) {
            let covers = (0..a.len()).all(|i| {
                (0..b.len()).all(|j| a[i].compatible(&b[j]) || ma >> i & 1 == 1 || mb >> j & 1 == 1)
            });
            if covers {
                let v: f64 = (0..a.len()).filter(|i| ma >> i & 1 == 1).map(|i| al[i] * al[i] / na).sum::<f64>()
                    + (0..b.len()).filter(|j| mb >> j & 1 == 1).map(|j| bl[j] * bl[j] / nb).sum::<f64>();
                best = best.min(v);
            }
        }
    }
    best
}

pub struct OracleResult {
    /// Minimum squared length over sequences satisfying (P1)-(P3).
    pub best_p123: f64,
    /// Minimum squared length over sequences satisfying (P1)-(P2).
    pub best_p12: f64,
    pub n_valid: usize,
}

/// Exhaustive support-sequence search. Returns squared distances.
pub fn brute_geodesic(x: &TreePoint, t: &TreePoint) -> OracleResult {
    let xs = x.splits();
    let ts = t.splits();
    let ai: Vec<usize> = (0..xs.len()).filter(|&i| ts.iter().any(|s| !s.compatible(&xs[i]))).collect();
    let bi: Vec<usize> = (0..ts.len()).filter(|&j| xs.iter().any(|s| !s.compatible(&ts[j]))).collect();
    let mut base = 0.0;
    for (i, s) in xs.iter().enumerate() {
        if !ai.contains(&i) {
            base += (x.lengths()[i] - t.length(s)).powi(2);
        }
    }
    for (j, s) in ts.iter().enumerate() {
        if !bi.contains(&j) && !x.contains(s) {
            base += t.lengths()[j].powi(2);
        }
    }
    for (p, q) in x.pendants().iter().zip(t.pendants()) {
        base += (p - q).powi(2);
    }
    if ai.is_empty() {
        return OracleResult { best_p123: base, best_p12: base, n_valid: 1 };
    }
    let a: Vec<Split> = ai.iter().map(|&i| xs[i]).collect();
    let al: Vec<f64> = ai.iter().map(|&i| x.lengths()[i]).collect();
    let b: Vec<Split> = bi.iter().map(|&j| ts[j]).collect();
    let bl: Vec<f64> = bi.iter().map(|&j| t.lengths()[j]).collect();

    let mut best_p123 = f64::INFINITY;
    let mut best_p12 = f64::INFINITY;
    let mut n_valid = 0;
    for k in 1..=a.len().min(b.len()) {
        let pa = ordered_partitions(a.len(), k);
        let pb = ordered_partitions(b.len(), k);
        for ablocks in &pa {
            for bblocks in &pb {
                // (P1): B_j compatible with A_l whenever j < l
                let p1 = (0..k).all(|j| {
                    (j + 1..k).all(|l| bblocks[j].iter().all(|&u| ablocks[l].iter().all(|&v| b[u].compatible(&a[v]))))
                });
                if !p1 {
                    continue;
                }
                let ratios: Vec<f64> = (0..k).map(|l| norm(&al, &ablocks[l]) / norm(&bl, &bblocks[l])).collect();
                if ratios.windows(2).any(|w| w[0] > w[1] * (1.0 + 1e-12)) {
                    continue;
                }
                let len2: f64 = base
                    + (0..k).map(|l| (norm(&al, &ablocks[l]) + norm(&bl, &bblocks[l])).powi(2)).sum::<f64>();
                best_p12 = best_p12.min(len2);
                let p3 = (0..k).all(|l| {
                    let sa: Vec<Split> = ablocks[l].iter().map(|&i| a[i]).collect();
                    let sal: Vec<f64> = ablocks[l].iter().map(|&i| al[i]).collect();
                    let sb: Vec<Split> = bblocks[l].iter().map(|&j| b[j]).collect();
                    let sbl: Vec<f64> = bblocks[l].iter().map(|&j| bl[j]).collect();
                    brute_min_cover(&sa, &sal, &sb, &sbl) >= 1.0 - 1e-10
                });
                if p3 {
                    n_valid += 1;
                    best_p123 = best_p123.min(len2);
                }
            }
        }
    }
    OracleResult { best_p123, best_p12, n_valid }
}

/// Central finite difference of `f` at `x` along coordinate `i`.
pub fn central_diff(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] += h;
    xm[i] -= h;
    (f(&xp) - f(&xm)) / (2.0 * h)
}
