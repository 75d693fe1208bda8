//! Count splits and fully resolved topologies for small label sets.

use treespace::{enumerate_maximal_topologies, enumerate_splits, LabelSet};

fn main() -> treespace::Result<()> {
    println!("r  splits  topologies");
    for r in 3..=7 {
        let l = LabelSet::new(r)?;
        println!("{r}  {:6}  {:10}", enumerate_splits(&l)?.len(), enumerate_maximal_topologies(&l)?.len());
    }
    let l = LabelSet::new(4)?;
    for t in enumerate_maximal_topologies(&l)?.iter().take(3) {
        let names: Vec<String> = t.splits().iter().map(|s| s.to_string()).collect();
        println!("{}", names.join(" "));
    }
    Ok(())
}
