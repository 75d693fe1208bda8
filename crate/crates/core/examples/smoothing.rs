//! Kernel smoothing of trees whose topology drifts with a predictor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treespace::frechet::Tolerances;
use treespace::smooth::{min_rep_sequence, smooth_family, summary_csv, summarize, RegressionData};
use treespace::{parse_tree, LabelSet};

fn main() -> treespace::Result<()> {
    let l = LabelSet::new(4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut xs, mut trees) = (Vec::new(), Vec::new());
    for i in 0..30 {
        let x = i as f64 / 29.0;
        // {1,2} fades out while {3,4} and later {1,3} grow in
        let a = (1.0 - x) * 2.0 + rng.gen_range(0.0..0.3);
        let b = x * 2.0 + rng.gen_range(0.0..0.3);
        let nwk = if x < 0.7 {
            format!("(0:1,(1:1,2:1):{a},(3:1,4:1):{b});")
        } else {
            format!("(0:1,(1:1,3:1):{b},2:1,4:1);")
        };
        xs.push(x);
        trees.push(parse_tree(&nwk, &l)?);
    }
    let d = RegressionData::new(xs.clone(), trees)?;
    let grid: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
    for s in smooth_family(&d, &grid, &[0.05, 0.2, 1.0], &Tolerances::default())? {
        let fits: Vec<_> = s.fits.iter().flatten().cloned().collect();
        println!("h = {}: {} representative topologies", s.h, min_rep_sequence(&fits)?.len());
        print!("{}", summary_csv(&summarize(&s)));
    }
    Ok(())
}
