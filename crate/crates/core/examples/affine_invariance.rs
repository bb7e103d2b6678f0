//! Apply a linear map to a framework and check that every flex keeps its Gram velocity.

use nalgebra::DMatrix;
use periodica::auxetics::{affine_invariance_check, apply_affine};
use periodica::constructors::double_arrowhead;
use periodica::quotient::to_periodic;
use periodica::rigidity::{deformation_basis, relative_residual, periodic_rigidity_matrix, Structure};

fn main() -> periodica::Result<()> {
    let framework = to_periodic(&double_arrowhead())?;
    let a = DMatrix::from_row_slice(2, 2, &[1.3, 0.4, -0.2, 0.9]);
    let image = apply_affine(&framework, &a)?;
    let space = deformation_basis(&Structure::Periodic(framework.clone()))?;
    for x in &space.basis {
        let check = affine_invariance_check(&framework, &a, x)?;
        let mapped = image.map(x)?;
        let residual = relative_residual(
            &periodic_rigidity_matrix(&image.framework),
            &mapped.to_coordinates(),
        );
        println!(
            "holds: {}, max deviation {:.2e}, mapped flex residual {:.2e}",
            check.holds, check.max_deviation, residual
        );
    }
    println!("image lattice:\n{}", image.framework.lattice());
    Ok(())
}
