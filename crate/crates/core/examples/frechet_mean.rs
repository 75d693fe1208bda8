//! Weighted Frechet mean with the composite SPPA + Newton solver.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treespace::frechet::{frechet_mean, FrechetProblem};
use treespace::random::{clustered_trees, RandomTreeOptions};
use treespace::{serialize_tree, LabelSet};

fn main() -> treespace::Result<()> {
    let l = LabelSet::new(5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data = clustered_trees(&l, 25, 0.6, &mut rng, &RandomTreeOptions::default());
    let p = FrechetProblem::new(data, None)?;

    let res = frechet_mean(&p)?;
    println!("mean   {}", serialize_tree(&res.mean));
    println!("F      {:.10}", res.value);
    println!("status {:?} after {} records", res.trace.termination, res.trace.records.len());
    println!(
        "optimal: gradient {:.2e}, min normal derivative {:?}",
        res.report.max_abs_gradient, res.report.min_normal_derivative
    );
    Ok(())
}
