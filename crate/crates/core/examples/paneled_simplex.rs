//! Build paneled simplices and check that the altitude flex opens every period while
//! a single-vertex flex moves only one diagonal entry of the Gram matrix.

use periodica::auxetics::{verdict, Tolerance};
use periodica::constructors::paneled_simplex;
use periodica::rigidity::{finite_dof, Structure};

fn main() -> periodica::Result<()> {
    for d in [2, 3] {
        let ps = paneled_simplex(d)?;
        let report = finite_dof(ps.linkage())?;
        let structure = Structure::Finite(ps.linkage().clone());
        let all = structure.gram_velocity_of(&ps.altitude_flex())?;
        let v = verdict(&all, Tolerance::default());
        println!(
            "d = {d}: n = {}, m = {}, f = {}; altitude flex {:?}, eigenvalues {:?}",
            ps.linkage().vertex_count(),
            ps.linkage().edge_count(),
            report.dof,
            v.kind,
            v.eigenvalues
        );
        for k in 1..=d {
            let w = structure.gram_velocity_of(&ps.single_vertex_flex(k))?;
            println!("  moving v_{k} alone:\n{w}");
        }
    }
    Ok(())
}
