//! Fewest topologies that represent an ordered list of trees.

use treespace::smooth::min_rep_sequence;
use treespace::{parse_tree, LabelSet};

fn main() -> treespace::Result<()> {
    let l = LabelSet::new(4)?;
    let trees = [
        "(0:1,(1:1,2:1):1,3:1,4:1);",
        "(0:1,(1:1,2:1):1,(3:1,4:1):0.2);",
        "(0:1,1:1,2:1,(3:1,4:1):0.5);",
        "(0:1,(1:1,3:1):1,2:1,4:1);",
        "(0:1,((1:1,3:1):1,2:1):0.4,4:1);",
    ]
    .iter()
    .map(|s| parse_tree(s, &l))
    .collect::<treespace::Result<Vec<_>>>()?;

    let seq = min_rep_sequence(&trees)?;
    for b in &seq.blocks {
        let names: Vec<String> = b.topology.splits().iter().map(|s| s.to_string()).collect();
        println!("trees {}..={}: {}", b.start, b.end, names.join(" "));
    }
    Ok(())
}
