//! Gram-matrix velocities and positive-semidefinite cone verdicts.
//!
//! A one-parameter deformation is auxetic when the velocity `ω̇` of the Gram matrix
//! of the periods stays in the positive semidefinite cone, strictly auxetic when it
//! stays positive definite.

mod affine;
mod search;

pub use affine::{affine_invariance_check, apply_affine, AffineImage, InvarianceCheck};
pub use search::{sampled_lambda_min, strict_direction, SearchBudget, StrictDirection, DEFAULT_SEED};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{InfinitesimalDeformation, PeriodicFramework, SymmetricMatrix};
use crate::rigidity::Structure;

/// Default PSD tolerance, relative to `‖ω̇‖_F`.
pub const PSD_RTOL: f64 = 1e-8;
/// Stationary threshold, relative to `‖Λ‖²_F`.
pub const STATIONARY_RTOL: f64 = 1e-12;

/// `Λ̇ᵀΛ + ΛᵀΛ̇`.
pub fn gram_velocity(lattice: &DMatrix<f64>, lattice_velocity: &DMatrix<f64>) -> SymmetricMatrix {
    let a = lattice_velocity.transpose() * lattice;
    SymmetricMatrix::from_upper(&(&a + a.transpose()))
}

/// Tolerances of a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    /// Relative to `‖ω̇‖_F`.
    pub relative: f64,
    /// Absolute bound on `‖ω̇‖_F` below which the tangent counts as zero.
    pub stationary: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            relative: PSD_RTOL,
            stationary: STATIONARY_RTOL,
        }
    }
}

impl Tolerance {
    /// Default tolerances scaled to a lattice.
    pub fn for_lattice(lattice: &DMatrix<f64>) -> Self {
        Tolerance {
            relative: PSD_RTOL,
            stationary: STATIONARY_RTOL * lattice.norm_squared(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    Stationary,
    StrictlyAuxetic,
    WeaklyAuxetic,
    NonAuxetic,
}

impl VerdictKind {
    /// Tangent lies in the closed PSD cone and is non-zero.
    pub fn is_auxetic(self) -> bool {
        matches!(self, VerdictKind::StrictlyAuxetic | VerdictKind::WeaklyAuxetic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxeticVerdict {
    pub kind: VerdictKind,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub tolerance: Tolerance,
}

impl AuxeticVerdict {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Classifies a Gram velocity against the PSD cone.
pub fn verdict(omega_dot: &SymmetricMatrix, tol: Tolerance) -> AuxeticVerdict {
    let eigenvalues = omega_dot.eigenvalues();
    let norm = omega_dot.frobenius_norm();
    let lmin = eigenvalues[0];
    let kind = if norm <= tol.stationary {
        VerdictKind::Stationary
    } else if lmin > tol.relative * norm {
        VerdictKind::StrictlyAuxetic
    } else if lmin.abs() <= tol.relative * norm {
        VerdictKind::WeaklyAuxetic
    } else {
        VerdictKind::NonAuxetic
    };
    AuxeticVerdict {
        kind,
        eigenvalues,
        tolerance: tol,
    }
}

/// Gram velocity of a periodic framework under one of its flexes.
pub fn deformation_gram_velocity(
    framework: &PeriodicFramework,
    x: &InfinitesimalDeformation,
) -> Result<SymmetricMatrix> {
    Structure::Periodic(framework.clone()).gram_velocity_of(x)
}

/// Checks `nᵀ ω̇ n ≥ -tol ‖ω̇‖_F ‖n‖²` for every integer vector with `‖n‖_∞ ≤ radius`.
///
/// Necessary for positive semidefiniteness; exhaustive over the box, not a certificate.
pub fn lattice_monotonicity(omega_dot: &SymmetricMatrix, radius: i64, tol: f64) -> bool {
    let d = omega_dot.dim();
    let norm = omega_dot.frobenius_norm();
    let side = (2 * radius + 1) as usize;
    let total = side.pow(d as u32);
    let mut n = vec![0.0; d];
    for idx in 0..total {
        let mut rest = idx;
        for c in n.iter_mut() {
            *c = (rest % side) as f64 - radius as f64;
            rest /= side;
        }
        let len2: f64 = n.iter().map(|x| x * x).sum();
        if len2 == 0.0 {
            continue;
        }
        if omega_dot.quadratic_form(&n) < -tol * norm * len2 {
            return false;
        }
    }
    true
}
