mod common;

use common::*;
use treespace::{distance, gtp_geodesic};

#[test]
fn gtp_matches_exhaustive_support_search() {
    let mut rng = rng(11);
    for case in 0..300 {
        let l = labels(3 + case % 3);
        let x = tree(&l, &mut rng);
        let t = tree(&l, &mut rng);
        let d = distance(&x, &t).unwrap();
        let o = brute_geodesic(&x, &t);
        assert!(o.n_valid >= 1, "no valid support found");
        assert!((d * d - o.best_p123).abs() < 1e-9, "case {case}: {} vs {}", d * d, o.best_p123);
        assert!((d * d - o.best_p12).abs() < 1e-9);
    }
}

#[test]
fn metric_axioms_on_random_triples() {
    let mut rng = rng(12);
    for _ in 0..100 {
        let l = labels(5);
        let (a, b, c) = (tree(&l, &mut rng), tree(&l, &mut rng), tree(&l, &mut rng));
        let ab = distance(&a, &b).unwrap();
        assert_eq!(ab, distance(&a, &b).unwrap());
        assert!((ab - distance(&b, &a).unwrap()).abs() < 1e-9);
        assert!(ab <= distance(&a, &c).unwrap() + distance(&c, &b).unwrap() + 1e-9);
        assert_eq!(distance(&a, &a).unwrap(), 0.0);
    }
}

#[test]
fn point_along_is_additive() {
    let mut rng = rng(13);
    for _ in 0..30 {
        let l = labels(6);
        let (x, t) = (tree(&l, &mut rng), tree(&l, &mut rng));
        let g = gtp_geodesic(&x, &t).unwrap();
        for &(s, u) in &[(0.1, 0.7), (0.3, 0.35), (0.0, 1.0)] {
            let ps = g.point_along(s).unwrap();
            let pu = g.point_along(u).unwrap();
            let dd = distance(&ps, &pu).unwrap();
            assert!((dd - (u - s) * g.distance()).abs() < 1e-8, "{dd} vs {}", (u - s) * g.distance());
        }
    }
}
