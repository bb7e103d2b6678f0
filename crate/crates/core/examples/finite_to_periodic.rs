//! Turn a finite linkage with marked pairs into a periodic framework and compare the
//! degree-of-freedom counts on both sides.

use periodica::constructors::{cadelniza, CadelnizaParams};
use periodica::io::framework_to_json;
use periodica::quotient::convert;
use periodica::rigidity::{finite_dof, periodic_dof};

fn main() -> periodica::Result<()> {
    let linkage = cadelniza(CadelnizaParams::new(3))?;
    let finite = finite_dof(&linkage)?;
    let conversion = convert(&linkage)?;
    let periodic = periodic_dof(&conversion.framework)?;

    println!(
        "finite linkage: n = {}, m = {}, f = {}",
        linkage.vertex_count(),
        linkage.edge_count(),
        finite.dof
    );
    println!(
        "periodic framework: {} vertex orbits, {} edge orbits, f = {}",
        conversion.quotient.orbit_count, conversion.quotient.edge_orbit_count, periodic.dof
    );
    println!("lattice (columns are periods):\n{}", conversion.framework.lattice());
    print!("{}", framework_to_json(&conversion.framework));
    Ok(())
}
