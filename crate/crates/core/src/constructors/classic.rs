//! The double arrowhead quadrilateral, the cadelniza linkage and its roofing.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{FiniteLinkage, InfinitesimalDeformation, PeriodicFramework};
use crate::quotient::to_periodic;
use crate::rigidity::periodic_dof;

/// Concave quadrilateral `(0,0), (1,h), (2,0), (1,g)` with both diagonals marked.
///
/// Requires `0 < g < h`, which puts the reflex vertex inside the triangle of the others.
pub fn double_arrowhead_with(h: f64, g: f64) -> Result<FiniteLinkage> {
    if !(g > 0.0 && h > g && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "double arrowhead needs 0 < g < h, got h = {h}, g = {g}"
        )));
    }
    let p = |x: f64, y: f64| DVector::from_vec(vec![x, y]);
    FiniteLinkage::new(
        2,
        vec![p(0.0, 0.0), p(1.0, h), p(2.0, 0.0), p(1.0, g)],
        &[(0, 1), (1, 2), (2, 3), (3, 0)],
        vec![(0, 2), (3, 1)],
    )
}

/// [`double_arrowhead_with`] at `h = 1`, `g = 0.4`.
pub fn double_arrowhead() -> FiniteLinkage {
    double_arrowhead_with(1.0, 0.4).expect("default parameters are valid")
}

/// Parameters of the cadelniza linkage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CadelnizaParams {
    pub dim: usize,
    pub floor_edge: f64,
    /// Apex heights above the floor, `0 < h1 < h2`.
    pub h1: f64,
    pub h2: f64,
}

impl CadelnizaParams {
    /// Unit floor edge; apex bars 1.2 and 1.6 times the floor circumradius.
    pub fn new(dim: usize) -> Self {
        Self::with_edge(dim, 1.0)
    }

    pub fn with_edge(dim: usize, floor_edge: f64) -> Self {
        let r = floor_circumradius(dim, floor_edge);
        let height = |ratio: f64| r * (ratio * ratio - 1.0).sqrt();
        CadelnizaParams {
            dim,
            floor_edge,
            h1: height(1.2),
            h2: height(1.6),
        }
    }
}

/// Circumradius of the regular (d−1)-simplex with edge `a`.
pub fn floor_circumradius(dim: usize, a: f64) -> f64 {
    a * ((dim as f64 - 1.0) / (2.0 * dim as f64)).sqrt()
}

/// Vertices of a regular (d−1)-simplex with edge `a`, centred at the origin of R^{d−1}.
fn regular_floor(dim: usize, a: f64) -> Vec<DVector<f64>> {
    // project e_1 … e_d onto the orthonormal Helmert basis of {x : Σ x_i = 0}
    let helmert: Vec<DVector<f64>> = (1..dim)
        .map(|k| {
            let s = ((k * (k + 1)) as f64).sqrt();
            DVector::from_fn(dim, |i, _| match i.cmp(&k) {
                std::cmp::Ordering::Less => 1.0 / s,
                std::cmp::Ordering::Equal => -(k as f64) / s,
                std::cmp::Ordering::Greater => 0.0,
            })
        })
        .collect();
    let scale = a / std::f64::consts::SQRT_2;
    (0..dim)
        .map(|i| DVector::from_fn(dim - 1, |k, _| helmert[k][i] * scale))
        .collect()
}

/// Cadelniza linkage: `d` unconnected floor vertices forming a regular simplex in
/// `x_d = 0`, two apexes on the vertical axis through its centre barred to all of them.
///
/// Vertices `0 … d−1` are the floor, `d` is the lower apex `w_1`, `d+1` the upper apex
/// `w_2`. Marked pairs: `(w_1, w_2)` first, then `(f_0, f_j)` for `j = 1 … d−1`.
pub fn cadelniza(params: CadelnizaParams) -> Result<FiniteLinkage> {
    let CadelnizaParams {
        dim,
        floor_edge,
        h1,
        h2,
    } = params;
    if dim < 3 {
        return Err(Error::InvalidParameter(format!("cadelniza needs d >= 3, got {dim}")));
    }
    if !(floor_edge > 0.0 && floor_edge.is_finite()) {
        return Err(Error::InvalidParameter("floor edge must be positive".into()));
    }
    if !(h1 > 0.0 && h2 > h1 && h2.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "apex heights need 0 < h1 < h2, got {h1}, {h2}"
        )));
    }
    let mut vertices: Vec<DVector<f64>> = regular_floor(dim, floor_edge)
        .into_iter()
        .map(|f| f.push(0.0))
        .collect();
    let apex = |h: f64| DVector::from_fn(dim, |i, _| if i == dim - 1 { h } else { 0.0 });
    vertices.push(apex(h1));
    vertices.push(apex(h2));
    let mut edges = Vec::with_capacity(2 * dim);
    for w in [dim, dim + 1] {
        for f in 0..dim {
            edges.push((f, w));
        }
    }
    let mut pairs = vec![(dim, dim + 1)];
    pairs.extend((1..dim).map(|j| (0, j)));
    FiniteLinkage::new(dim, vertices, &edges, pairs)
}

/// Flex dilating the floor about its centre; apexes slide to keep their bar lengths.
pub fn cadelniza_dilation_flex(linkage: &FiniteLinkage) -> InfinitesimalDeformation {
    let d = linkage.dim();
    let v = linkage.vertices();
    let r = v[0].norm();
    let mut vel: Vec<DVector<f64>> = v[..d].to_vec();
    for w in [d, d + 1] {
        let h = v[w][d - 1];
        // |f|² + h² constant ⇒ R Ṙ + h ḣ = 0 with Ṙ = R
        vel.push(DVector::from_fn(d, |i, _| if i == d - 1 { -r * r / h } else { 0.0 }));
    }
    InfinitesimalDeformation {
        vertex_velocities: vel,
        lattice_velocity: None,
    }
}

/// Extra edge orbits of the d = 3 roofing: `TC` in the far floor, `TN` in the near one.
///
/// Orbit 0 is the floor, orbit 1 the apexes; periods are (vertical, λ_1, λ_2).
pub fn roofing_preset() -> Vec<(usize, usize, Vec<i64>)> {
    roofing_series(0)
}

/// The `j`-th member of a series of roofings sharing the same roof planes.
///
/// Member `j` joins the apex to the points `2 + j` and `1 + j` periods along λ_1 in the
/// far and near floor, which keeps both new bars in the planes of the preset.
pub fn roofing_series(j: u32) -> Vec<(usize, usize, Vec<i64>)> {
    let j = j as i64;
    vec![(0, 1, vec![1, -2 - j, 0]), (0, 1, vec![0, -1 - j, -1])]
}

/// The alternative pattern: next member of the roofing series.
pub fn roofing_alternative() -> Vec<(usize, usize, Vec<i64>)> {
    roofing_series(1)
}

/// Adds edge orbits and checks that a single degree of freedom remains.
pub fn roof(framework: &PeriodicFramework, orbits: &[(usize, usize, Vec<i64>)]) -> Result<PeriodicFramework> {
    let mut f = framework.clone();
    for (u, v, s) in orbits {
        f = f.add_edge_orbit(*u, *v, s)?;
    }
    let report = periodic_dof(&f)?;
    if report.dof != 1 {
        return Err(Error::InvalidParameter(format!(
            "roofing leaves {} degrees of freedom",
            report.dof
        )));
    }
    Ok(f)
}

/// Periodic framework of the d = 3 cadelniza with the roofing preset applied.
pub fn roofed_cadelniza() -> Result<PeriodicFramework> {
    let base = to_periodic(&cadelniza(CadelnizaParams::new(3))?)?;
    roof(&base, &roofing_preset())
}

/// Change of basis from the periods to (vertical, λ_1, in-floor normal to λ_1).
///
/// Columns express the adapted vectors in period coordinates, so the Gram velocity in
/// the adapted basis is `Pᵀ ω̇ P`.
pub fn roofing_adapted_basis(lattice: &DMatrix<f64>) -> DMatrix<f64> {
    let l1 = lattice.column(1);
    let l2 = lattice.column(2);
    let t = l1.dot(&l2) / l1.dot(&l1);
    DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, -t, 0.0, 0.0, 1.0])
}
