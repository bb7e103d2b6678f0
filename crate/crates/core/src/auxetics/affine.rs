//! Affine images of periodic frameworks and their infinitesimal deformations.
//!
//! Under `p ↦ Ap`, `Λ ↦ AΛ` a flex `(ṗ, Λ̇)` corresponds to `(A⁻ᵀṗ, A⁻ᵀΛ̇)`: edge
//! constraints `⟨e, ė⟩` and the Gram velocity `Λ̇ᵀΛ + ΛᵀΛ̇` are both unchanged.

use nalgebra::DMatrix;
use serde::Serialize;

use super::gram_velocity;
use crate::error::{Error, Result};
use crate::geometry::{InfinitesimalDeformation, PeriodicFramework};
use crate::rigidity::gauge_fix_periodic;

/// Relative tolerance of the Gram-velocity identity.
pub const INVARIANCE_RTOL: f64 = 1e-10;

/// Affine image of a framework together with the induced map on deformations.
#[derive(Debug, Clone)]
pub struct AffineImage {
    pub framework: PeriodicFramework,
    pub matrix: DMatrix<f64>,
    inverse_transpose: DMatrix<f64>,
}

impl AffineImage {
    /// `(A⁻ᵀṗ, A⁻ᵀΛ̇)` without gauge fixing.
    pub fn map_raw(&self, x: &InfinitesimalDeformation) -> Result<InfinitesimalDeformation> {
        let ldot = x
            .lattice_velocity
            .as_ref()
            .ok_or(Error::MissingLatticeVelocity)?;
        let d = self.framework.dim();
        if ldot.shape() != (d, d) || x.vertex_velocities.len() != self.framework.orbit_count() {
            return Err(Error::DimensionMismatch {
                expected: self.framework.orbit_count(),
                found: x.vertex_velocities.len(),
            });
        }
        Ok(InfinitesimalDeformation {
            vertex_velocities: x
                .vertex_velocities
                .iter()
                .map(|v| &self.inverse_transpose * v)
                .collect(),
            lattice_velocity: Some(&self.inverse_transpose * ldot),
        })
    }

    /// The mapped deformation, moved into the gauge of the image framework.
    pub fn map(&self, x: &InfinitesimalDeformation) -> Result<InfinitesimalDeformation> {
        let raw = self.map_raw(x)?;
        gauge_fix_periodic(
            self.framework.lattice(),
            self.framework.vertex_orbits(),
            &raw,
        )
    }
}

/// Applies the invertible linear map `A` to a framework; lengths are re-measured.
pub fn apply_affine(framework: &PeriodicFramework, a: &DMatrix<f64>) -> Result<AffineImage> {
    let d = framework.dim();
    if a.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.nrows(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let inv = a.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    if !crate::geometry::is_basis(a) {
        return Err(Error::SingularMatrix);
    }
    let lattice = a * framework.lattice();
    let orbits = framework.vertex_orbits().iter().map(|p| a * p).collect();
    let image = framework.with_geometry(lattice, orbits)?;
    Ok(AffineImage {
        framework: image,
        matrix: a.clone(),
        inverse_transpose: inv.transpose(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceCheck {
    pub holds: bool,
    /// Largest entrywise deviation between the two Gram velocities.
    pub max_deviation: f64,
    /// `‖ω̇‖_F` of the original flex.
    pub reference_norm: f64,
}

/// Compares `ω̇` of `x` on `F` with `ω̇` of its image on `AF`, before any gauge fixing.
pub fn affine_invariance_check(
    framework: &PeriodicFramework,
    a: &DMatrix<f64>,
    x: &InfinitesimalDeformation,
) -> Result<InvarianceCheck> {
    let image = apply_affine(framework, a)?;
    let mapped = image.map_raw(x)?;
    let before = gram_velocity(
        framework.lattice(),
        x.lattice_velocity.as_ref().expect("checked by map_raw"),
    );
    let after = gram_velocity(
        image.framework.lattice(),
        mapped.lattice_velocity.as_ref().expect("set by map_raw"),
    );
    let max_deviation = before.max_abs_diff(&after);
    let reference_norm = before.frobenius_norm();
    Ok(InvarianceCheck {
        holds: max_deviation <= INVARIANCE_RTOL * reference_norm,
        max_deviation,
        reference_norm,
    })
}
