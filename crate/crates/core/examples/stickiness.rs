//! Sticky, partly sticky and non-sticky means on four leaves, plus a
//! stick-time simulation.

use treespace::frechet::frechet_mean;
use treespace::sticky::{classify_t3, page_moments, perpendicular_diagnostic, stick_time_experiment, t3_mean, T3Sample};
use treespace::serialize_tree;

fn main() -> treespace::Result<()> {
    let samples = [
        ("symmetric", T3Sample::from_pages(&[(1, 1.0), (2, 1.0), (3, 1.0)])?),
        ("heavy page", T3Sample::from_pages(&[(1, 1.0), (1, 1.0), (1, 1.0), (1, 1.0), (1, 1.0), (1, 1.0), (1, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)])?),
        ("boundary", T3Sample::from_pages(&[(1, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)])?),
    ];
    for (name, s) in &samples {
        let p = s.to_problem()?;
        let solved = frechet_mean(&p)?;
        let diag = perpendicular_diagnostic(&t3_mean(s), &p, 1e-10)?;
        println!(
            "{name:10} moments {:?} -> {:?}; mean {} (solver {}); diagnostic {:?}",
            page_moments(s),
            classify_t3(s).kind,
            serialize_tree(&t3_mean(s)),
            serialize_tree(&solved.mean),
            diag.kind
        );
    }

    let times = stick_time_experiment(&samples[0].1, 200, 100, 42)?;
    for n in [1, 5, 10, 25, 50, 100, 200] {
        println!("stuck by n = {n:3}: {:.2}", times.fraction_stuck(n));
    }
    Ok(())
}
