//! Minimum-weight vertex cover on the bipartite incompatibility graph,
//! via max-flow / min-cut (Edmonds-Karp on a dense residual matrix).

const FLOW_EPS: f64 = 1e-15;

/// A minimum cover `C1 ∪ D2`, with `c1[i]` true when `A[i]` is covered and
/// `d2[j]` true when `B[j]` is covered.
#[derive(Debug, Clone)]
pub(crate) struct Cover {
    pub c1: Vec<bool>,
    pub d2: Vec<bool>,
    pub value: f64,
}

/// `incompatible(i, j)` tells whether `A[i]` and `B[j]` share an arc.
pub(crate) fn min_weight_cover(wa: &[f64], wb: &[f64], incompatible: impl Fn(usize, usize) -> bool) -> Cover {
    let m = wa.len();
    let n = wb.len();
    let nn = m + n + 2;
    let (s, t) = (0, nn - 1);
    let mut cap = vec![0.0f64; nn * nn];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nn];
    let mut link = |cap: &mut Vec<f64>, u: usize, v: usize, c: f64| {
        cap[u * nn + v] = c;
        adj[u].push(v);
        adj[v].push(u);
    };
    for i in 0..m {
        link(&mut cap, s, 1 + i, wa[i]);
        for j in 0..n {
            if incompatible(i, j) {
                link(&mut cap, 1 + i, 1 + m + j, f64::INFINITY);
            }
        }
    }
    for j in 0..n {
        link(&mut cap, 1 + m + j, t, wb[j]);
    }

    let mut prev = vec![usize::MAX; nn];
    let mut queue = Vec::with_capacity(nn);
    loop {
        prev.iter_mut().for_each(|p| *p = usize::MAX);
        prev[s] = s;
        queue.clear();
        queue.push(s);
        let mut head = 0;
        while head < queue.len() && prev[t] == usize::MAX {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                if prev[v] == usize::MAX && cap[u * nn + v] > FLOW_EPS {
                    prev[v] = u;
                    queue.push(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = t;
        while v != s {
            let u = prev[v];
            bottleneck = bottleneck.min(cap[u * nn + v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u * nn + v] -= bottleneck;
            cap[v * nn + u] += bottleneck;
            v = u;
        }
    }
    // after the last BFS, `prev` marks the residual-reachable source side S
    let reach = |v: usize| prev[v] != usize::MAX;
    let mut c1: Vec<bool> = (0..m).map(|i| !reach(1 + i)).collect();
    let mut d2: Vec<bool> = (0..n).map(|j| reach(1 + m + j)).collect();

    // drop redundant vertices left over from rounding
    for i in 0..m {
        if c1[i] && (0..n).all(|j| !incompatible(i, j) || d2[j]) {
            c1[i] = false;
        }
    }
    for j in 0..n {
        if d2[j] && (0..m).all(|i| !incompatible(i, j) || c1[i]) {
            d2[j] = false;
        }
    }
    let value = (0..m).filter(|&i| c1[i]).map(|i| wa[i]).sum::<f64>() + (0..n).filter(|&j| d2[j]).map(|j| wb[j]).sum::<f64>();
    Cover { c1, d2, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(wa: &[f64], wb: &[f64], inc: &dyn Fn(usize, usize) -> bool) -> f64 {
        let (m, n) = (wa.len(), wb.len());
        let mut best = f64::INFINITY;
        for ma in 0u32..(1 << m) {
            for mb in 0u32..(1 << n) {
                let ok = (0..m).all(|i| (0..n).all(|j| !inc(i, j) || ma >> i & 1 == 1 || mb >> j & 1 == 1));
                if ok {
                    let v = (0..m).filter(|i| ma >> i & 1 == 1).map(|i| wa[i]).sum::<f64>()
                        + (0..n).filter(|j| mb >> j & 1 == 1).map(|j| wb[j]).sum::<f64>();
                    best = best.min(v);
                }
            }
        }
        best
    }

    #[test]
    fn matches_exhaustive_cover() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let m = rng.gen_range(1..5);
            let n = rng.gen_range(1..5);
            let wa: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
            let wb: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
            let edges: Vec<Vec<bool>> = (0..m).map(|_| (0..n).map(|_| rng.gen_bool(0.5)).collect()).collect();
            let inc = |i: usize, j: usize| edges[i][j];
            let c = min_weight_cover(&wa, &wb, inc);
            for i in 0..m {
                for j in 0..n {
                    assert!(!inc(i, j) || c.c1[i] || c.d2[j]);
                }
            }
            assert!((c.value - brute(&wa, &wb, &inc)).abs() < 1e-12);
        }
    }
}
