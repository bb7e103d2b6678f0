//! The gallery `L_k`: a regular `3k`-gon in the horizontal plane, two apexes on its
//! axis barred to every polygon vertex, and one polygon edge removed.
//!
//! During the deformation the polygon stays on the circle where the two apex spheres
//! meet. With the circle radius `r` as parameter, each remaining polygon edge subtends
//! `2 asin(sin(π/3k)/r)`, so `k` edges subtend `θ(r) = 2k asin(sin(π/3k)/r)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::auxetics::{verdict, AuxeticVerdict, Tolerance};
use crate::error::{Error, Result};
use crate::geometry::{FiniteLinkage, SymmetricMatrix};

/// Seed of the optional polygon perturbation.
pub const PERTURBATION_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LkParams {
    pub k: usize,
    /// Heights of `w_1` and `w_2` above the polygon plane, `0 < z1 < z2`.
    pub z1: f64,
    pub z2: f64,
    /// Magnitude of a seeded random displacement of the polygon vertices.
    pub perturbation: f64,
}

impl LkParams {
    pub fn new(k: usize) -> Self {
        LkParams {
            k,
            z1: 1.0,
            z2: 2.0,
            perturbation: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::InvalidParameter(format!("L_k needs k >= 3, got {}", self.k)));
        }
        if !(self.z1 > 0.0 && self.z2 > self.z1 && self.z2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "apex heights need 0 < z1 < z2, got {}, {}",
                self.z1, self.z2
            )));
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return Err(Error::InvalidParameter("perturbation must be >= 0".into()));
        }
        Ok(())
    }

    /// Bar lengths from the apexes, fixed by the unit-circle start.
    pub fn bar_lengths(&self) -> (f64, f64) {
        ((1.0 + self.z1 * self.z1).sqrt(), (1.0 + self.z2 * self.z2).sqrt())
    }

    /// Open interval of admissible radii.
    pub fn radius_domain(&self) -> (f64, f64) {
        let a = (PI / (3 * self.k) as f64).sin();
        let (l1, _) = self.bar_lengths();
        (a, (1.0 / a).min(l1))
    }
}

/// Index of the polygon edge `(P_i, P_{i+1})` removed from the `v_1`–`v_2` arc.
pub fn deleted_edge(k: usize) -> (usize, usize) {
    let i = k + (k - 1) / 2;
    (i, i + 1)
}

/// Polygon vertex `P_i = (−cos(2πi/3k), sin(2πi/3k), 0)` at radius `r`.
fn polygon_vertex(k: usize, i: usize, r: f64) -> DVector<f64> {
    let t = 2.0 * PI * i as f64 / (3 * k) as f64;
    DVector::from_vec(vec![-r * t.cos(), r * t.sin(), 0.0])
}

/// The linkage `L_k` at `r = 1`.
///
/// Vertices `0 … 3k−1` are the polygon (`v_0 = 0`, `v_1 = k`, `v_2 = 2k`), then `w_1`,
/// `w_2`. Marked pairs: `(w_1, w_2)`, `(v_0, v_1)`, `(v_0, v_2)`.
pub fn gallery_lk(params: LkParams) -> Result<FiniteLinkage> {
    params.validate()?;
    let k = params.k;
    let n = 3 * k;
    let mut vertices: Vec<DVector<f64>> = (0..n).map(|i| polygon_vertex(k, i, 1.0)).collect();
    if params.perturbation > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(PERTURBATION_SEED);
        for p in &mut vertices {
            for c in p.iter_mut() {
                *c += params.perturbation * rng.random_range(-1.0..1.0);
            }
        }
    }
    vertices.push(DVector::from_vec(vec![0.0, 0.0, params.z1]));
    vertices.push(DVector::from_vec(vec![0.0, 0.0, params.z2]));
    let removed = deleted_edge(k);
    let mut edges: Vec<(usize, usize)> = (0..n)
        .map(|i| (i, (i + 1) % n))
        .filter(|&e| e != removed)
        .collect();
    for w in [n, n + 1] {
        edges.extend((0..n).map(|i| (i, w)));
    }
    FiniteLinkage::new(3, vertices, &edges, vec![(n, n + 1), (0, k), (0, 2 * k)])
}

/// Closed-form kinematics of `L_k` at radius `r`, in marked-pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct LkClosedForm {
    pub r: f64,
    pub theta: f64,
    pub dtheta_dr: f64,
    pub vertical: DVector<f64>,
    pub lambda1: DVector<f64>,
    pub lambda2: DVector<f64>,
    pub omega: SymmetricMatrix,
    pub domega_dr: SymmetricMatrix,
}

impl LkClosedForm {
    /// Lattice with columns (vertical, λ_1, λ_2).
    pub fn lattice(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&[
            self.vertical.clone(),
            self.lambda1.clone(),
            self.lambda2.clone(),
        ])
    }

    /// Horizontal 2×2 block of `dω/dr`.
    pub fn horizontal_rate(&self) -> SymmetricMatrix {
        let m = self.domega_dr.to_matrix();
        SymmetricMatrix::from_upper(&m.view((1, 1), (2, 2)).into_owned())
    }

    /// Eigenvalues and PSD verdict of the horizontal block of `dω/dr`.
    pub fn horizontal_verdict(&self) -> AuxeticVerdict {
        verdict(&self.horizontal_rate(), Tolerance::default())
    }
}

/// `θ(r)`, `λ_{1,2}(r) = r(1 − cos θ, ± sin θ, 0)`, the vertical period and `dω/dr`.
pub fn lk_closed_form(params: LkParams, r: f64) -> Result<LkClosedForm> {
    params.validate()?;
    let (lo, hi) = params.radius_domain();
    if !(r > lo && r < hi) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} outside ({lo}, {hi})"
        )));
    }
    let k = params.k as f64;
    let a = (PI / (3.0 * k)).sin();
    let theta = 2.0 * k * (a / r).asin();
    let dtheta = 2.0 * k * (-a / (r * r)) / (1.0 - a * a / (r * r)).sqrt();
    let (c, s) = (theta.cos(), theta.sin());
    let (l1, l2) = params.bar_lengths();
    let h1 = (l1 * l1 - r * r).sqrt();
    let h2 = (l2 * l2 - r * r).sqrt();
    let v = h2 - h1;

    let vertical = DVector::from_vec(vec![0.0, 0.0, v]);
    let lambda1 = DVector::from_vec(vec![r * (1.0 - c), r * s, 0.0]);
    let lambda2 = DVector::from_vec(vec![r * (1.0 - c), -r * s, 0.0]);

    let w11 = 2.0 * r * r * (1.0 - c);
    let w12 = 2.0 * r * r * c * (c - 1.0);
    let dw11 = 4.0 * r * (1.0 - c) + 2.0 * r * r * s * dtheta;
    let dw12 = 4.0 * r * (c * c - c) - 2.0 * r * r * (2.0 * c - 1.0) * s * dtheta;
    let dvv = 2.0 * v * r * (1.0 / h1 - 1.0 / h2);

    let omega = SymmetricMatrix::from_upper(&DMatrix::from_row_slice(
        3,
        3,
        &[v * v, 0.0, 0.0, 0.0, w11, w12, 0.0, w12, w11],
    ));
    let domega_dr = SymmetricMatrix::from_upper(&DMatrix::from_row_slice(
        3,
        3,
        &[dvv, 0.0, 0.0, 0.0, dw11, dw12, 0.0, dw12, dw11],
    ));
    Ok(LkClosedForm {
        r,
        theta,
        dtheta_dr: dtheta,
        vertical,
        lambda1,
        lambda2,
        omega,
        domega_dr,
    })
}

/// Vertex positions of `L_k` (unperturbed) deformed to radius `r`.
pub fn lk_positions(params: LkParams, r: f64) -> Result<Vec<DVector<f64>>> {
    let cf = lk_closed_form(params, r)?;
    let k = params.k;
    let (l1, l2) = params.bar_lengths();
    let h1 = (l1 * l1 - r * r).sqrt();
    let h2 = (l2 * l2 - r * r).sqrt();
    let step = cf.theta / k as f64; // central angle of one edge
    // walk the chain both ways from v_0, which stays on the negative x axis
    let removed = deleted_edge(k);
    let n = 3 * k;
    let mut out = vec![DVector::zeros(3); n + 2];
    for i in 0..n {
        let steps = if i <= removed.0 { i as f64 } else { i as f64 - n as f64 };
        let t = steps * step;
        out[i] = DVector::from_vec(vec![-r * t.cos(), r * t.sin(), 0.0]);
    }
    out[n] = DVector::from_vec(vec![0.0, 0.0, h1]);
    out[n + 1] = DVector::from_vec(vec![0.0, 0.0, h2]);
    Ok(out)
}
