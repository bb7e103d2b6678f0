//! Rigidity matrices, degree-of-freedom counts and gauge-fixed deformation spaces.
//!
//! Unknown ordering is the same everywhere: vertex velocity blocks of size `d` in
//! vertex order, followed (periodic case only) by the `d²` entries of the lattice
//! velocity in column-major order.

use nalgebra::{DMatrix, DVector};

use crate::auxetics::gram_velocity;
use crate::error::{Error, Result};
use crate::geometry::{FiniteLinkage, InfinitesimalDeformation, PeriodicFramework, SymmetricMatrix};
use crate::linalg::{self, binomial, skew_basis, FullSvd};

/// Rigidity matrix of a bar graph: one row per edge, `n·d` columns.
pub fn bar_rigidity_matrix(
    dim: usize,
    vertices: &[DVector<f64>],
    edges: &[(usize, usize)],
) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(edges.len(), vertices.len() * dim);
    for (row, &(u, v)) in edges.iter().enumerate() {
        let e = &vertices[v] - &vertices[u];
        for k in 0..dim {
            r[(row, v * dim + k)] += e[k];
            r[(row, u * dim + k)] -= e[k];
        }
    }
    r
}

pub fn finite_rigidity_matrix(linkage: &FiniteLinkage) -> DMatrix<f64> {
    bar_rigidity_matrix(linkage.dim(), linkage.vertices(), &linkage.edge_pairs())
}

/// Dimension of the affine hull of a point set.
pub fn affine_span_dim(vertices: &[DVector<f64>]) -> usize {
    if vertices.len() < 2 {
        return 0;
    }
    let dim = vertices[0].len();
    let mut m = DMatrix::zeros(dim, vertices.len() - 1);
    for (k, p) in vertices[1..].iter().enumerate() {
        m.set_column(k, &(p - &vertices[0]));
    }
    let svd = FullSvd::new(&m);
    let thr = svd.threshold();
    svd.singular_values
        .iter()
        .take(dim.min(vertices.len() - 1))
        .filter(|&&s| s > thr)
        .count()
}

/// Translations followed by rotations about the first vertex.
pub fn finite_trivial_motions(dim: usize, vertices: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let n = vertices.len();
    let mut out = Vec::new();
    for k in 0..dim {
        let mut t = DVector::zeros(n * dim);
        for i in 0..n {
            t[i * dim + k] = 1.0;
        }
        out.push(t);
    }
    out.extend(finite_rotations(dim, vertices));
    out
}

fn finite_rotations(dim: usize, vertices: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let n = vertices.len();
    skew_basis(dim)
        .into_iter()
        .map(|s| {
            let mut t = DVector::zeros(n * dim);
            for i in 0..n {
                let w = &s * (&vertices[i] - &vertices[0]);
                t.rows_mut(i * dim, dim).copy_from(&w);
            }
            t
        })
        .collect()
}

/// Outcome of a rank-based degree-of-freedom count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofReport {
    pub dof: usize,
    pub independent: bool,
    pub rank: usize,
    pub constraints: usize,
    pub unknowns: usize,
}

pub fn bar_dof(dim: usize, vertices: &[DVector<f64>], edges: &[(usize, usize)]) -> Result<DofReport> {
    if affine_span_dim(vertices) < dim {
        return Err(Error::DegeneratePlacement(dim));
    }
    let r = bar_rigidity_matrix(dim, vertices, edges);
    let rank = linalg::rank(&r)?;
    let unknowns = vertices.len() * dim;
    let trivial = binomial(dim + 1, 2);
    Ok(DofReport {
        dof: (unknowns - rank).saturating_sub(trivial),
        independent: rank == edges.len(),
        rank,
        constraints: edges.len(),
        unknowns,
    })
}

/// Degrees of freedom of a finite linkage (rigid motions removed).
pub fn finite_dof(linkage: &FiniteLinkage) -> Result<DofReport> {
    bar_dof(linkage.dim(), linkage.vertices(), &linkage.edge_pairs())
}

/// Rigidity matrix of a periodic framework: one row per edge orbit, `ñ·d + d²` columns.
pub fn periodic_rigidity_matrix(framework: &PeriodicFramework) -> DMatrix<f64> {
    let d = framework.dim();
    let n = framework.orbit_count();
    let off = n * d;
    let mut r = DMatrix::zeros(framework.edge_orbit_count(), off + d * d);
    for (row, e) in framework.edge_orbits().iter().enumerate() {
        let vec = framework.edge_vector(e);
        for k in 0..d {
            r[(row, e.v * d + k)] += vec[k];
            r[(row, e.u * d + k)] -= vec[k];
        }
        for j in 0..d {
            let g = e.shift[j] as f64;
            if g == 0.0 {
                continue;
            }
            for i in 0..d {
                r[(row, off + j * d + i)] += vec[i] * g;
            }
        }
    }
    r
}

/// Translations (`ṗ_i = t`, `Λ̇ = 0`) then rotations (`ṗ_i = S p_i`, `Λ̇ = S Λ`).
pub fn periodic_trivial_motions(framework: &PeriodicFramework) -> Vec<DVector<f64>> {
    let d = framework.dim();
    let n = framework.orbit_count();
    let mut out = Vec::new();
    for k in 0..d {
        let mut t = DVector::zeros(n * d + d * d);
        for i in 0..n {
            t[i * d + k] = 1.0;
        }
        out.push(t);
    }
    for s in skew_basis(d) {
        let mut t = DVector::zeros(n * d + d * d);
        for (i, p) in framework.vertex_orbits().iter().enumerate() {
            t.rows_mut(i * d, d).copy_from(&(&s * p));
        }
        let sl = &s * framework.lattice();
        t.rows_mut(n * d, d * d).copy_from_slice(sl.as_slice());
        out.push(t);
    }
    out
}

/// Linear gauge rows: `ṗ_0 = 0` (d rows) and `skew(Λ̇Λ⁻¹) = 0` (d choose 2 rows).
pub fn periodic_gauge_rows(lattice: &DMatrix<f64>, orbit_count: usize) -> DMatrix<f64> {
    let d = lattice.nrows();
    let off = orbit_count * d;
    let inv = lattice
        .clone()
        .try_inverse()
        .expect("validated lattice is invertible");
    let mut g = DMatrix::zeros(d + binomial(d, 2), off + d * d);
    for k in 0..d {
        g[(k, k)] = 1.0;
    }
    let mut row = d;
    for a in 0..d {
        for b in a + 1..d {
            // (Λ̇Λ⁻¹)_ab - (Λ̇Λ⁻¹)_ba
            for c in 0..d {
                g[(row, off + c * d + a)] += inv[(c, b)];
                g[(row, off + c * d + b)] -= inv[(c, a)];
            }
            row += 1;
        }
    }
    g
}

/// Moves a periodic flex into the gauge `ṗ_0 = 0`, `skew(Λ̇Λ⁻¹) = 0` by adding trivial motions.
pub fn gauge_fix_periodic(
    lattice: &DMatrix<f64>,
    vertex_orbits: &[DVector<f64>],
    x: &InfinitesimalDeformation,
) -> Result<InfinitesimalDeformation> {
    let ldot = x
        .lattice_velocity
        .as_ref()
        .ok_or(Error::MissingLatticeVelocity)?;
    let inv = lattice.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let m = ldot * inv;
    let s = (&m - m.transpose()) * 0.5;
    let new_ldot = ldot - &s * lattice;
    let mut vel: Vec<DVector<f64>> = x
        .vertex_velocities
        .iter()
        .zip(vertex_orbits)
        .map(|(v, p)| v - &s * p)
        .collect();
    let t = vel[0].clone();
    for v in &mut vel {
        *v -= &t;
    }
    Ok(InfinitesimalDeformation {
        vertex_velocities: vel,
        lattice_velocity: Some(new_ldot),
    })
}

/// Moves a finite flex into the gauge: first vertex pinned, rotation components about it removed.
pub fn gauge_fix_finite(
    vertices: &[DVector<f64>],
    x: &InfinitesimalDeformation,
) -> InfinitesimalDeformation {
    let dim = vertices[0].len();
    let n = vertices.len();
    let t = x.vertex_velocities[0].clone();
    let shifted = InfinitesimalDeformation {
        vertex_velocities: x.vertex_velocities.iter().map(|v| v - &t).collect(),
        lattice_velocity: None,
    };
    let mut coords = shifted.to_coordinates();
    let rots = finite_rotations(dim, vertices);
    if !rots.is_empty() {
        let k = rots.len();
        let gram = DMatrix::from_fn(k, k, |a, b| rots[a].dot(&rots[b]));
        let rhs = DVector::from_fn(k, |a, _| rots[a].dot(&coords));
        if let Some(c) = gram.lu().solve(&rhs) {
            for (a, r) in rots.iter().enumerate() {
                coords -= r * c[a];
            }
        }
    }
    InfinitesimalDeformation::from_coordinates(dim, n, false, &coords)
}

/// Degrees of freedom of a periodic framework (translations and rotations removed).
pub fn periodic_dof(framework: &PeriodicFramework) -> Result<DofReport> {
    let r = periodic_rigidity_matrix(framework);
    let rank = linalg::rank(&r)?;
    let d = framework.dim();
    let unknowns = framework.orbit_count() * d + d * d;
    let trivial = d + binomial(d, 2);
    Ok(DofReport {
        dof: (unknowns - rank).saturating_sub(trivial),
        independent: rank == framework.edge_orbit_count(),
        rank,
        constraints: framework.edge_orbit_count(),
        unknowns,
    })
}

/// The structure a deformation space belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Finite(FiniteLinkage),
    Periodic(PeriodicFramework),
}

impl Structure {
    pub fn dim(&self) -> usize {
        match self {
            Structure::Finite(l) => l.dim(),
            Structure::Periodic(f) => f.dim(),
        }
    }

    pub fn lattice(&self) -> DMatrix<f64> {
        match self {
            Structure::Finite(l) => l.lattice_matrix(),
            Structure::Periodic(f) => f.lattice().clone(),
        }
    }

    pub fn rigidity_matrix(&self) -> DMatrix<f64> {
        match self {
            Structure::Finite(l) => finite_rigidity_matrix(l),
            Structure::Periodic(f) => periodic_rigidity_matrix(f),
        }
    }

    pub fn dof(&self) -> Result<DofReport> {
        match self {
            Structure::Finite(l) => finite_dof(l),
            Structure::Periodic(f) => periodic_dof(f),
        }
    }

    /// Gram velocity of the marked basis (finite) or the lattice (periodic) under a flex.
    pub fn gram_velocity_of(&self, x: &InfinitesimalDeformation) -> Result<SymmetricMatrix> {
        match self {
            Structure::Finite(l) => {
                if x.vertex_velocities.len() != l.vertex_count() {
                    return Err(Error::DimensionMismatch {
                        expected: l.vertex_count(),
                        found: x.vertex_velocities.len(),
                    });
                }
                Ok(gram_velocity(
                    &l.lattice_matrix(),
                    &l.marked_velocity(&x.vertex_velocities),
                ))
            }
            Structure::Periodic(f) => {
                let ldot = x
                    .lattice_velocity
                    .as_ref()
                    .ok_or(Error::MissingLatticeVelocity)?;
                if ldot.shape() != (f.dim(), f.dim()) {
                    return Err(Error::DimensionMismatch {
                        expected: f.dim(),
                        found: ldot.nrows(),
                    });
                }
                Ok(gram_velocity(f.lattice(), ldot))
            }
        }
    }
}

impl From<FiniteLinkage> for Structure {
    fn from(l: FiniteLinkage) -> Self {
        Structure::Finite(l)
    }
}

impl From<PeriodicFramework> for Structure {
    fn from(f: PeriodicFramework) -> Self {
        Structure::Periodic(f)
    }
}

/// Gauge-fixed space of infinitesimal deformations.
#[derive(Debug, Clone)]
pub struct DeformationSpace {
    pub parent: Structure,
    pub unknown_count: usize,
    pub constraint_rank: usize,
    pub dof: usize,
    pub independent: bool,
    /// Orthonormal in the flat coordinate vector.
    pub basis: Vec<InfinitesimalDeformation>,
}

impl DeformationSpace {
    /// Gram velocity of every basis element, in basis order.
    pub fn gram_velocities(&self) -> Vec<SymmetricMatrix> {
        self.basis
            .iter()
            .map(|x| {
                self.parent
                    .gram_velocity_of(x)
                    .expect("basis matches its parent")
            })
            .collect()
    }

    /// Linear combination of the basis.
    pub fn combine(&self, coefficients: &[f64]) -> InfinitesimalDeformation {
        let mut acc = self.basis[0].to_coordinates() * 0.0;
        for (c, b) in coefficients.iter().zip(&self.basis) {
            acc += b.to_coordinates() * *c;
        }
        let periodic = matches!(self.parent, Structure::Periodic(_));
        let n = self.basis[0].vertex_velocities.len();
        InfinitesimalDeformation::from_coordinates(self.parent.dim(), n, periodic, &acc)
    }
}

/// Flips a kernel vector so its Gram velocity has positive trace (opening orientation).
fn orient(parent: &Structure, x: InfinitesimalDeformation) -> InfinitesimalDeformation {
    let w = parent.gram_velocity_of(&x).expect("matching dimensions");
    let trace: f64 = (0..w.dim()).map(|i| w.get(i, i)).sum();
    let sign = if trace.abs() > 1e-12 * w.frobenius_norm().max(f64::MIN_POSITIVE) {
        trace.signum()
    } else {
        let c = x.to_coordinates();
        c.iter()
            .find(|v| v.abs() > 1e-12)
            .map(|v| v.signum())
            .unwrap_or(1.0)
    };
    if sign < 0.0 {
        x.scaled(-1.0)
    } else {
        x
    }
}

fn gauge_fixed_kernel(
    r: &DMatrix<f64>,
    gauge: &DMatrix<f64>,
) -> Result<(usize, Vec<DVector<f64>>)> {
    let rows = r.nrows() + gauge.nrows();
    let mut a = DMatrix::zeros(rows, r.ncols());
    a.view_mut((0, 0), r.shape()).copy_from(r);
    a.view_mut((r.nrows(), 0), gauge.shape()).copy_from(gauge);
    linalg::kernel(&a)
}

pub fn finite_deformation_space(linkage: &FiniteLinkage) -> Result<DeformationSpace> {
    let report = finite_dof(linkage)?;
    let dim = linkage.dim();
    let n = linkage.vertex_count();
    let r = finite_rigidity_matrix(linkage);
    let rots = finite_rotations(dim, linkage.vertices());
    let mut gauge = DMatrix::zeros(dim + rots.len(), n * dim);
    for k in 0..dim {
        gauge[(k, k)] = 1.0;
    }
    for (i, rot) in rots.iter().enumerate() {
        gauge.set_row(dim + i, &rot.transpose());
    }
    let (_, kernel) = gauge_fixed_kernel(&r, &gauge)?;
    if kernel.len() != report.dof {
        return Err(ambiguous(&r));
    }
    let parent = Structure::Finite(linkage.clone());
    let basis = kernel
        .iter()
        .map(|x| orient(&parent, InfinitesimalDeformation::from_coordinates(dim, n, false, x)))
        .collect();
    Ok(DeformationSpace {
        parent,
        unknown_count: n * dim,
        constraint_rank: report.rank,
        dof: report.dof,
        independent: report.independent,
        basis,
    })
}

pub fn periodic_deformation_space(framework: &PeriodicFramework) -> Result<DeformationSpace> {
    let report = periodic_dof(framework)?;
    let d = framework.dim();
    let n = framework.orbit_count();
    let r = periodic_rigidity_matrix(framework);
    let gauge = periodic_gauge_rows(framework.lattice(), n);
    let (_, kernel) = gauge_fixed_kernel(&r, &gauge)?;
    if kernel.len() != report.dof {
        return Err(ambiguous(&r));
    }
    let parent = Structure::Periodic(framework.clone());
    let basis = kernel
        .iter()
        .map(|x| orient(&parent, InfinitesimalDeformation::from_coordinates(d, n, true, x)))
        .collect();
    Ok(DeformationSpace {
        parent,
        unknown_count: n * d + d * d,
        constraint_rank: report.rank,
        dof: report.dof,
        independent: report.independent,
        basis,
    })
}

fn ambiguous(r: &DMatrix<f64>) -> Error {
    let svd = FullSvd::new(r);
    Error::RankToleranceAmbiguous {
        sigma: svd.sigma_min(),
        threshold: svd.threshold(),
    }
}

/// Gauge-fixed orthonormal deformation basis of either kind of structure.
pub fn deformation_basis(structure: &Structure) -> Result<DeformationSpace> {
    match structure {
        Structure::Finite(l) => finite_deformation_space(l),
        Structure::Periodic(f) => periodic_deformation_space(f),
    }
}

/// `‖R x‖ / (‖R‖₂ ‖x‖)`.
pub fn relative_residual(r: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let norm_r = FullSvd::new(r).sigma_max();
    let denom = norm_r * x.norm();
    if denom == 0.0 {
        0.0
    } else {
        (r * x).norm() / denom
    }
}
