//! Cyclic proximal point and the inductive mean against the composite solver.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treespace::frechet::{cyclic_sppa, frechet_mean, frechet_value, inductive_mean, FrechetProblem};
use treespace::random::{random_trees, RandomTreeOptions};
use treespace::LabelSet;

fn main() -> treespace::Result<()> {
    let l = LabelSet::new(4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = FrechetProblem::new(random_trees(&l, 10, &mut rng, &RandomTreeOptions::default()), None)?;
    let best = frechet_mean(&p)?.value;
    println!("composite   F = {best:.10}");

    let order: Vec<usize> = (0..p.len()).collect();
    for sweeps in [10, 100, 1000] {
        let (x, _) = cyclic_sppa(&p, &order, sweeps)?;
        println!("cyclic {sweeps:>5} sweeps  F - F* = {:.3e}", frechet_value(&x, &p)? - best);
    }
    for steps in [1_000, 10_000, 100_000] {
        let (x, trace) = inductive_mean(&p, steps, 11)?;
        println!("inductive {steps:>6} steps  F - F* = {:.3e}  ({} checkpoints)", frechet_value(&x, &p)? - best, trace.records.len());
    }
    Ok(())
}
