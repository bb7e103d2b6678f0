//! Paneled simplices and reduction to a single degree of freedom.
//!
//! A rigid scaffold carries `v_0`; every `v_k` hangs on a hinge that lets it move only
//! along the outward altitude of the simplex `[p_0 … p_d]` at `p_k`. Moving one `v_k`
//! alone changes only the `(k, k)` entry of the Gram matrix of `λ_k = p_k − p_0`, so
//! moving all of them gives a positive definite Gram velocity.

use nalgebra::{DMatrix, DVector};

use super::hinge::{attach_hinge, relative_to_scaffold, BarGraph, HingeAttachment, HingeSpec};
use crate::error::{Error, Result};
use crate::geometry::{FiniteLinkage, InfinitesimalDeformation};
use crate::linalg::condition_number;
use crate::rigidity::finite_dof;

/// Largest accepted condition number of the system fixing `q̇`.
pub const MAX_CONDITION: f64 = 1e8;
const HINGE_OFFSET: f64 = 0.3;

/// A linkage with a distinguished rigid scaffold and distinguished moving vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaffoldedLinkage {
    pub linkage: FiniteLinkage,
    pub scaffold: Vec<usize>,
    /// `v_1 … v_d`, in marked-pair order.
    pub moving: Vec<usize>,
}

impl ScaffoldedLinkage {
    /// A flex seen from the scaffold (scaffold velocities removed by a rigid motion).
    pub fn relative(&self, x: &InfinitesimalDeformation) -> InfinitesimalDeformation {
        InfinitesimalDeformation {
            vertex_velocities: relative_to_scaffold(
                self.linkage.vertices(),
                &self.scaffold,
                &x.vertex_velocities,
            ),
            lattice_velocity: None,
        }
    }

    /// Velocities of the moving vertices.
    pub fn moving_velocities(&self, x: &InfinitesimalDeformation) -> Vec<DVector<f64>> {
        self.moving
            .iter()
            .map(|&v| x.vertex_velocities[v].clone())
            .collect()
    }
}

/// Unit outward altitude directions `μ_1 … μ_d` of the simplex `p_0 … p_d`.
///
/// `μ_k` is row `k` of `Λ⁻¹` (with `Λ = [p_1 − p_0 … p_d − p_0]`), normalized: it is
/// orthogonal to every `λ_j`, `j ≠ k`, and has positive product with `λ_k`.
pub fn altitude_directions(points: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let d = points.first().map(|p| p.len()).unwrap_or(0);
    if d == 0 || points.len() != d + 1 {
        return Err(Error::DegenerateSimplex);
    }
    let lattice = DMatrix::from_fn(d, d, |i, k| points[k + 1][i] - points[0][i]);
    if !crate::geometry::is_basis(&lattice) {
        return Err(Error::DegenerateSimplex);
    }
    let inv = lattice.try_inverse().ok_or(Error::DegenerateSimplex)?;
    Ok((0..d)
        .map(|k| inv.row(k).transpose().normalize())
        .collect())
}

/// A paneled simplex with its altitude data.
#[derive(Debug, Clone, PartialEq)]
pub struct PaneledSimplex {
    pub scaffolded: ScaffoldedLinkage,
    /// `μ_1 … μ_d`.
    pub altitudes: Vec<DVector<f64>>,
    pub hinges: Vec<HingeAttachment>,
}

impl PaneledSimplex {
    pub fn linkage(&self) -> &FiniteLinkage {
        &self.scaffolded.linkage
    }

    /// Flex moving only `v_k` (1-based) along its altitude.
    pub fn single_vertex_flex(&self, k: usize) -> InfinitesimalDeformation {
        let l = self.linkage();
        let mut vel = vec![DVector::zeros(l.dim()); l.vertex_count()];
        vel[self.scaffolded.moving[k - 1]] = self.altitudes[k - 1].clone();
        InfinitesimalDeformation {
            vertex_velocities: vel,
            lattice_velocity: None,
        }
    }

    /// Flex moving every `v_k` along its altitude with unit speed.
    pub fn altitude_flex(&self) -> InfinitesimalDeformation {
        let l = self.linkage();
        let mut vel = vec![DVector::zeros(l.dim()); l.vertex_count()];
        for (v, mu) in self.scaffolded.moving.iter().zip(&self.altitudes) {
            vel[*v] = mu.clone();
        }
        InfinitesimalDeformation {
            vertex_velocities: vel,
            lattice_velocity: None,
        }
    }
}

fn unit(d: usize, k: usize) -> DVector<f64> {
    DVector::from_fn(d, |i, _| if i == k % d { 1.0 } else { 0.0 })
}

/// Paneled simplex in R^d with `d` degrees of freedom.
///
/// `v_0` is vertex 0 at the origin and belongs to the scaffold simplex; the interest
/// points `p_k` are a fixed generic basis. Marked pairs are `(v_0, v_k)`.
pub fn paneled_simplex(d: usize) -> Result<PaneledSimplex> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("paneled simplex needs d >= 2, got {d}")));
    }
    let lambda: Vec<DVector<f64>> = (0..d)
        .map(|k| unit(d, k) + unit(d, k + 1) * 0.3 - unit(d, k + 2) * 0.1)
        .collect();
    let p0 = DVector::zeros(d);
    let mut interest = vec![p0.clone()];
    interest.extend(lambda.iter().cloned());
    let altitudes = altitude_directions(&interest)?;

    let mut g = BarGraph {
        dim: d,
        vertices: vec![p0],
        edges: Vec::new(),
    };
    for k in 0..d {
        g.add_vertex(&lambda[k] * 0.5 + &lambda[(k + 1) % d] * 0.15);
    }
    for a in 0..=d {
        for b in a + 1..=d {
            g.edges.push((a, b));
        }
    }
    let scaffold: Vec<usize> = (0..=d).collect();
    let mut moving = Vec::with_capacity(d);
    let mut hinges = Vec::with_capacity(d);
    for k in 0..d {
        let spec = HingeSpec::generic(
            &g,
            &scaffold,
            lambda[k].clone(),
            altitudes[k].clone(),
            HINGE_OFFSET,
        )?;
        let att = attach_hinge(&mut g, &scaffold, &spec)?;
        moving.push(att.vertex);
        hinges.push(att);
    }
    let pairs = moving.iter().map(|&v| (0, v)).collect();
    let linkage = g.into_linkage(pairs)?;
    Ok(PaneledSimplex {
        scaffolded: ScaffoldedLinkage {
            linkage,
            scaffold,
            moving,
        },
        altitudes,
        hinges,
    })
}

/// Solves `⟨ṗ_k − q̇, p_k − q⟩ = 0`, `k = 1 … d`, for `q̇`.
pub fn solve_compatible_velocity(
    points: &[DVector<f64>],
    velocities: &[DVector<f64>],
    q: &DVector<f64>,
) -> Result<DVector<f64>> {
    let d = q.len();
    if points.len() != d || velocities.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: points.len(),
        });
    }
    let a = DMatrix::from_fn(d, d, |k, j| points[k][j] - q[j]);
    let b = DVector::from_fn(d, |k, _| velocities[k].dot(&(&points[k] - q)));
    let cond = condition_number(&a);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditionedPosition(cond));
    }
    a.lu().solve(&b).ok_or(Error::IllConditionedPosition(f64::INFINITY))
}

/// Result of the one-degree-of-freedom reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub scaffolded: ScaffoldedLinkage,
    pub w: usize,
    pub q_dot: DVector<f64>,
    pub hinge: HingeAttachment,
}

/// Adds a vertex `w` at `q` barred to every moving vertex and hinged to the scaffold
/// along the unique velocity compatible with `flex`.
///
/// `flex` is taken relative to the scaffold before the velocities of the moving
/// vertices are read.
pub fn reduce_to_one_dof(
    s: &ScaffoldedLinkage,
    flex: &InfinitesimalDeformation,
    q: &DVector<f64>,
) -> Result<Reduction> {
    let rel = s.relative(flex);
    let points: Vec<DVector<f64>> = s
        .moving
        .iter()
        .map(|&v| s.linkage.vertices()[v].clone())
        .collect();
    let q_dot = solve_compatible_velocity(&points, &s.moving_velocities(&rel), q)?;
    let mut g = BarGraph::from_linkage(&s.linkage);
    let spec = HingeSpec::generic(&g, &s.scaffold, q.clone(), q_dot.clone(), HINGE_OFFSET)?;
    let hinge = attach_hinge(&mut g, &s.scaffold, &spec)?;
    let w = hinge.vertex;
    for &v in &s.moving {
        g.edges.push((v, w));
    }
    let linkage = g.into_linkage(s.linkage.marked_pairs().to_vec())?;
    let report = finite_dof(&linkage)?;
    if !report.independent {
        return Err(Error::RedundantAttachment);
    }
    if report.dof != 1 {
        return Err(Error::InvalidParameter(format!(
            "reduction left {} degrees of freedom; choose q in general position",
            report.dof
        )));
    }
    Ok(Reduction {
        scaffolded: ScaffoldedLinkage {
            linkage,
            scaffold: s.scaffold.clone(),
            moving: s.moving.clone(),
        },
        w,
        q_dot,
        hinge,
    })
}

/// A point in general position for [`reduce_to_one_dof`] on a paneled simplex.
pub fn default_reduction_point(s: &ScaffoldedLinkage) -> DVector<f64> {
    let d = s.linkage.dim();
    let mean = s
        .moving
        .iter()
        .fold(DVector::zeros(d), |acc, &v| acc + &s.linkage.vertices()[v])
        / s.moving.len() as f64;
    let tilt = DVector::from_fn(d, |i, _| 0.17 * (i as f64 + 1.0));
    mean * 1.6 + tilt
}
