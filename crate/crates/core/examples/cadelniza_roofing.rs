//! Roof the periodic cadelniza framework down to one degree of freedom and inspect
//! its Gram velocity in the basis adapted to the roof.

use periodica::auxetics::{verdict, Tolerance};
use periodica::constructors::{
    cadelniza, roof, roofing_adapted_basis, roofing_alternative, roofing_preset, CadelnizaParams,
};
use periodica::quotient::to_periodic;
use periodica::rigidity::{deformation_basis, periodic_dof, Structure};

fn main() -> periodica::Result<()> {
    let base = to_periodic(&cadelniza(CadelnizaParams::new(3))?)?;
    println!("cadelniza: f = {}", periodic_dof(&base)?.dof);
    for (name, orbits) in [("preset", roofing_preset()), ("alternative", roofing_alternative())] {
        let roofed = roof(&base, &orbits)?;
        let space = deformation_basis(&Structure::Periodic(roofed.clone()))?;
        let w = space.gram_velocities().remove(0);
        let adapted = w.congruence(&roofing_adapted_basis(roofed.lattice()));
        let v = verdict(&adapted, Tolerance::default());
        println!("{name}: f = {}, verdict {:?}", space.dof, v.kind);
        println!("adapted Gram velocity:\n{adapted}");
    }
    Ok(())
}
