//! Geodesic between two trees: support pairs, length and points along it.

use treespace::{gtp_geodesic, parse_tree, serialize_tree, LabelSet};

fn main() -> treespace::Result<()> {
    let l = LabelSet::new(5)?;
    let x = parse_tree("(0:1,((1:1,2:1):2,3:1):1,(4:1,5:1):1);", &l)?;
    let t = parse_tree("(0:1,(1:1,(2:1,3:1):1.5):0.5,4:2,5:1);", &l)?;

    let g = gtp_geodesic(&x, &t)?;
    println!("d = {:.6}", g.distance());
    for (k, p) in g.support().pairs.iter().enumerate() {
        let a: Vec<String> = p.a.iter().map(|s| s.to_string()).collect();
        let b: Vec<String> = p.b.iter().map(|s| s.to_string()).collect();
        println!("pair {k}: A = [{}] |A| = {:.4}  B = [{}] |B| = {:.4}", a.join(" "), p.a_norm, b.join(" "), p.b_norm);
    }
    for i in 0..=4 {
        let lambda = i as f64 / 4.0;
        println!("{lambda:.2}  leg {}  {}", g.leg(lambda), serialize_tree(&g.point_along(lambda)?));
    }
    Ok(())
}
