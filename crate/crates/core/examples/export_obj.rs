//! Write a 2×2×2 block of the periodic cadelniza framework as an OBJ wireframe.

use periodica::constructors::{cadelniza, CadelnizaParams};
use periodica::io::export_obj;
use periodica::quotient::to_periodic;

fn main() -> periodica::Result<()> {
    let framework = to_periodic(&cadelniza(CadelnizaParams::new(3))?)?;
    let obj = export_obj(&framework, 2)?;
    let path = std::env::temp_dir().join("cadelniza.obj");
    std::fs::write(&path, &obj)?;
    let vertices = obj.lines().filter(|l| l.starts_with("v ")).count();
    let lines = obj.lines().filter(|l| l.starts_with("l ")).count();
    println!("{vertices} vertices, {lines} lines written to {}", path.display());
    Ok(())
}
