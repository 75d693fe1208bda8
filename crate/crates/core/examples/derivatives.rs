//! Restricted gradient and Hessian, and a directional derivative split
//! into tangent and perpendicular parts.

use treespace::frechet::{decompose_directional_derivative, restricted_gradient, restricted_hessian, FrechetProblem};
use treespace::{parse_tree, Direction, LabelSet, Split};

fn main() -> treespace::Result<()> {
    let l = LabelSet::new(4)?;
    let data = vec![
        parse_tree("(0:1,((1:1,2:1):1,3:1):2,4:1);", &l)?,
        parse_tree("(0:1,(1:1,(2:1,3:1):1):1,4:1);", &l)?,
        parse_tree("(0:1,(1:1,2:1):0.5,(3:1,4:1):1);", &l)?,
    ];
    let p = FrechetProblem::new(data, None)?;
    let x = parse_tree("(0:1,(1:1,2:1):0.8,3:1,4:1);", &l)?;

    let g = restricted_gradient(&x, &p)?;
    println!("gradient on {:?}: {:?}", g.splits.iter().map(|s| s.to_string()).collect::<Vec<_>>(), g.interior);
    println!("pendant gradient: {:?}", g.pendants);
    println!("hessian:\n{}", restricted_hessian(&x, &p)?.matrix);

    let new = Split::new(&l, &[1, 2, 3])?;
    let y = Direction::new(&x, vec![-0.5], vec![0.0; 5], vec![(new, 1.0)])?;
    let d = decompose_directional_derivative(&x, &y, &p)?;
    println!("F'(X,Y) = {:.6} = {:.6} (tangent) + {:.6} (perpendicular)", d.total, d.tangent, d.perpendicular);
    Ok(())
}
