//! Cut the planar paneled simplex down to one degree of freedom while keeping the
//! prescribed velocities of the moving vertices.

use periodica::constructors::{default_reduction_point, paneled_simplex, reduce_to_one_dof};
use periodica::rigidity::{deformation_basis, finite_dof, Structure};

fn main() -> periodica::Result<()> {
    let ps = paneled_simplex(2)?;
    let flex = ps.altitude_flex();
    let q = default_reduction_point(&ps.scaffolded);
    let reduction = reduce_to_one_dof(&ps.scaffolded, &flex, &q)?;
    let linkage = &reduction.scaffolded.linkage;
    println!("q = {:?}, q_dot = {:?}", q.as_slice(), reduction.q_dot.as_slice());
    println!("degrees of freedom after reduction: {}", finite_dof(linkage)?.dof);

    let space = deformation_basis(&Structure::Finite(linkage.clone()))?;
    let survivor = reduction.scaffolded.relative(&space.basis[0]);
    let target = ps.scaffolded.moving_velocities(&flex);
    let got = reduction.scaffolded.moving_velocities(&survivor);
    let scale = target[0].dot(&got[0]) / target[0].norm_squared();
    for (t, g) in target.iter().zip(&got) {
        println!("prescribed {:?}  surviving / {scale:.4} = {:?}", t.as_slice(), (g / scale).as_slice());
    }
    Ok(())
}
