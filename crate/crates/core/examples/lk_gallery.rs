//! Compare the closed-form kinematics of L_k with the generic rigidity pipeline and
//! report the eigenvalues of dω/dr at the unit circle.

use periodica::constructors::{gallery_lk, lk_closed_form, LkParams};
use periodica::quotient::to_periodic;
use periodica::rigidity::{deformation_basis, Structure};

fn main() -> periodica::Result<()> {
    for k in 3..=6 {
        let params = LkParams::new(k);
        let framework = to_periodic(&gallery_lk(params)?)?;
        let space = deformation_basis(&Structure::Periodic(framework))?;
        let pipeline = space.gram_velocities().remove(0);
        let closed = lk_closed_form(params, 1.0)?;
        let exact = &closed.domega_dr;
        // the pipeline flex is a multiple of d/dr
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                num += pipeline.get(i, j) * exact.get(i, j);
                den += exact.get(i, j) * exact.get(i, j);
            }
        }
        let c = num / den;
        let deviation = (&(exact * c) - &pipeline).max_abs_entry() / pipeline.max_abs_entry();
        let horizontal = closed.horizontal_verdict();
        println!(
            "k = {k}: flex = {c:.6} d/dr (rel. deviation {deviation:.1e}); dω/dr eigenvalues {:?}; vertical rate {:.6}; horizontal block {:?} {:?}",
            exact.eigenvalues(),
            exact.get(0, 0),
            horizontal.kind,
            horizontal.eigenvalues
        );
    }
    Ok(())
}
