//! Follow geodesic supports along a segment in one orthant and list the
//! parameters where some support changes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treespace::random::{random_tree, random_trees, RandomTreeOptions};
use treespace::tracker::{track_segment, Segment};
use treespace::LabelSet;

fn main() -> treespace::Result<()> {
    let l = LabelSet::new(5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = RandomTreeOptions { drop_prob: 0.0, ..Default::default() };
    let x0 = random_tree(&l, &mut rng, &opts);
    let lengths: Vec<f64> = x0.lengths().iter().enumerate().map(|(i, v)| if i == 0 { v * 0.1 } else { v * 1.7 }).collect();
    let x1 = x0.with_lengths(&lengths)?;
    let data = random_trees(&l, 6, &mut rng, &RandomTreeOptions::default());

    let seg = Segment::new(&x0, &x1)?;
    let tr = track_segment(&seg, &data)?;
    print!("{}", tr.events_csv());
    let w = vec![1.0 / 6.0; 6];
    for i in 0..=5 {
        let lambda = i as f64 / 5.0;
        println!("F({lambda:.1}) = {:.8}", tr.frechet_value(&w, lambda));
    }
    Ok(())
}
