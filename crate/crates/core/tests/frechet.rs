mod common;

use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use treespace::frechet::*;
use treespace::random::{clustered_trees, random_tree, random_trees, RandomTreeOptions};
use treespace::split::maximal_compatible_sets;
use treespace::{enumerate_splits, Direction, LabelSet, TreePoint};

fn problem(l: &LabelSet, n: usize, rng: &mut ChaCha8Rng) -> FrechetProblem {
    let data = random_trees(l, n, rng, &RandomTreeOptions::default());
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    FrechetProblem::new(data, Some(w)).unwrap()
}

fn f_at(x: &TreePoint, p: &FrechetProblem, lens: &[f64]) -> f64 {
    frechet_value(&x.with_lengths(lens).unwrap(), p).unwrap()
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = rng(21);
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let l = labels(rng.gen_range(4..=6));
        let p = problem(&l, 6, &mut rng);
        let x = tree(&l, &mut rng);
        let g = restricted_gradient(&x, &p).unwrap();
        let f = |v: &[f64]| f_at(&x, &p, v);
        for i in 0..x.num_splits() {
            let fd = central_diff(&f, x.lengths(), i, 1e-6);
            worst = worst.max((g.interior[i] - fd).abs() / g.interior[i].abs().max(1.0));
        }
    }
    assert!(worst < 1e-5, "worst relative error {worst}");
}

#[test]
fn hessian_matches_finite_differences() {
    let mut rng = rng(22);
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let l = labels(rng.gen_range(4..=6));
        let p = problem(&l, 6, &mut rng);
        let x = tree(&l, &mut rng);
        let h = restricted_hessian(&x, &p).unwrap();
        let m = x.num_splits();
        let grad = |v: &[f64]| restricted_gradient(&x.with_lengths(v).unwrap(), &p).unwrap().interior;
        for j in 0..m {
            let mut xp = x.lengths().to_vec();
            let mut xm = x.lengths().to_vec();
            xp[j] += 1e-5;
            xm[j] -= 1e-5;
            let (gp, gm) = (grad(&xp), grad(&xm));
            for i in 0..m {
                let fd = (gp[i] - gm[i]) / 2e-5;
                worst = worst.max((h.matrix[(i, j)] - fd).abs() / h.matrix[(i, j)].abs().max(1.0));
            }
        }
    }
    assert!(worst < 1e-4, "worst relative error {worst}");
}

/// One-sided derivative of `F(X + a Y)` at 0 by Richardson extrapolation.
fn numeric_dirder(x: &TreePoint, y: &Direction, p: &FrechetProblem) -> f64 {
    let f0 = frechet_value(x, p).unwrap();
    let d = |a: f64| (frechet_value(&x.step(y, a).unwrap(), p).unwrap() - f0) / a;
    let h = 1e-4;
    let r: Vec<f64> = (0..4).map(|k| d(h / 2f64.powi(k))).collect();
    // three rounds of Richardson on an O(h) series
    let r1: Vec<f64> = r.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r2: Vec<f64> = r1.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    (8.0 * r2[1] - r2[0]) / 7.0
}

fn random_direction(x: &TreePoint, rng: &mut ChaCha8Rng, tangent: bool, normal: bool) -> Option<Direction> {
    let l = *x.labels();
    let cand: Vec<_> = enumerate_splits(&l)
        .unwrap()
        .into_iter()
        .filter(|s| !x.contains(s) && x.is_compatible_with(s))
        .collect();
    let mut q = Vec::new();
    if normal {
        if cand.is_empty() {
            return None;
        }
        let sets = maximal_compatible_sets(&cand);
        let set = sets.choose(rng).unwrap();
        for s in set {
            if rng.gen_bool(0.7) || q.is_empty() {
                q.push((*s, rng.gen_range(0.2..1.5)));
            }
        }
    }
    let (tan, tp) = if tangent {
        (
            x.lengths().iter().map(|_| rng.gen_range(-1.0..1.0)).collect(),
            x.pendants().iter().map(|_| rng.gen_range(0.0..1.0)).collect(),
        )
    } else {
        (vec![0.0; x.num_splits()], vec![0.0; l.num_pendants()])
    };
    Some(Direction::new(x, tan, tp, q).unwrap())
}

#[test]
fn directional_derivative_decomposes() {
    let mut rng = rng(23);
    let opts = RandomTreeOptions { drop_prob: 0.5, ..Default::default() };
    let mut checked = 0;
    let (mut worst_lib, mut worst_num): (f64, f64) = (0.0, 0.0);
    while checked < 60 {
        let l = labels(rng.gen_range(4..=6));
        let p = problem(&l, 5, &mut rng);
        let x = random_tree(&l, &mut rng, &opts);
        let Some(y) = random_direction(&x, &mut rng, true, true) else { continue };
        let yt = Direction::new(&x, y.tangent().to_vec(), y.tangent_pendants().to_vec(), vec![]).unwrap();
        let yn = Direction::normal_only(&x, y.normal().to_vec()).unwrap();
        let dec = decompose_directional_derivative(&x, &y, &p).unwrap();
        let (n_all, n_t, n_n) = (numeric_dirder(&x, &y, &p), numeric_dirder(&x, &yt, &p), numeric_dirder(&x, &yn, &p));
        worst_lib = worst_lib.max((dec.total - n_all).abs() / n_all.abs().max(1.0));
        worst_lib = worst_lib.max((dec.perpendicular - n_n).abs() / n_n.abs().max(1.0));
        worst_lib = worst_lib.max((dec.tangent - n_t).abs() / n_t.abs().max(1.0));
        worst_num = worst_num.max((n_all - n_t - n_n).abs());
        checked += 1;
    }
    assert!(worst_lib < 1e-6, "library vs numeric {worst_lib}");
    assert!(worst_num < 1e-8, "numeric decomposition residual {worst_num}");
}

#[test]
fn normal_part_is_homogeneous_and_continuous() {
    let mut rng = rng(24);
    let opts = RandomTreeOptions { drop_prob: 0.6, ..Default::default() };
    let mut done = 0;
    while done < 30 {
        let l = labels(5);
        let p = problem(&l, 5, &mut rng);
        let x = random_tree(&l, &mut rng, &opts);
        let Some(y) = random_direction(&x, &mut rng, false, true) else { continue };
        if y.normal().len() < 2 {
            continue;
        }
        let base = directional_derivative(&x, &y, &p).unwrap();
        let scaled: Vec<_> = y.normal().iter().map(|(s, q)| (*s, 3.5 * q)).collect();
        let ys = Direction::normal_only(&x, scaled).unwrap();
        assert!((directional_derivative(&x, &ys, &p).unwrap() - 3.5 * base).abs() < 1e-12 * base.abs().max(1.0));
        // shrink the first new split toward zero: converge to the face value
        let mut face = y.normal().to_vec();
        let dropped = face.remove(0);
        let face_val = directional_derivative(&x, &Direction::normal_only(&x, face.clone()).unwrap(), &p).unwrap();
        let mut near = face.clone();
        near.push((dropped.0, 1e-9));
        let near_val = directional_derivative(&x, &Direction::normal_only(&x, near).unwrap(), &p).unwrap();
        assert!((near_val - face_val).abs() < 1e-6, "{near_val} vs {face_val}");
        done += 1;
    }
}

#[test]
fn composite_mean_passes_optimality() {
    let mut rng = rng(25);
    for _ in 0..8 {
        let l = labels(rng.gen_range(4..=5));
        let data = clustered_trees(&l, 12, 0.6, &mut rng, &RandomTreeOptions::default());
        let p = FrechetProblem::new(data, None).unwrap();
        let res = frechet_mean(&p).unwrap();
        assert!(res.trace.converged(), "{:?}", res.trace);
        assert!(res.report.passed());
        let (c, _) = cyclic_sppa(&p, &(0..p.len()).collect::<Vec<_>>(), 2000).unwrap();
        let fc = frechet_value(&c, &p).unwrap();
        assert!(res.value <= fc * (1.0 + 1e-6), "{} vs {}", res.value, fc);
        assert!((fc - res.value) / res.value < 1e-4);
    }
}
