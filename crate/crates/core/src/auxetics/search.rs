//! Search for a strictly auxetic direction in a deformation space.
//!
//! `λ_min(Σ x_i ω̇_i)` is concave and positively homogeneous in `x`, so its maximum
//! over the unit ball is positive exactly when some unit vector achieves a positive
//! value. The ascent runs on the unit sphere, which keeps a meaningful (negative) best
//! value when no strict direction exists.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{verdict, Tolerance, VerdictKind};
use crate::error::{Error, Result};
use crate::geometry::SymmetricMatrix;
use crate::linalg::symmetric_eigen;
use crate::rigidity::DeformationSpace;

pub const DEFAULT_SEED: u64 = 42;

/// Grid size of the angular oracle used when the space has at most two dimensions.
const GRID_POINTS: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 32,
            iterations: 500,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictDirection {
    pub found: bool,
    /// Unit coefficient vector in the deformation basis.
    pub coefficients: Vec<f64>,
    pub lambda_min: f64,
    /// Eigenvalues of the combined Gram velocity, ascending.
    pub eigenvalues: Vec<f64>,
    /// Best value of the angular grid (only for one or two degrees of freedom).
    pub grid_lambda_min: Option<f64>,
    pub seed: u64,
}

fn combine(velocities: &[SymmetricMatrix], x: &[f64]) -> SymmetricMatrix {
    let mut acc = SymmetricMatrix::zeros(velocities[0].dim());
    for (w, c) in velocities.iter().zip(x) {
        acc = &acc + &(w * *c);
    }
    acc
}

/// Minimum eigenvalue of the combination and its supergradient `(vᵀ ω̇_i v)_i`.
fn objective(velocities: &[SymmetricMatrix], x: &[f64]) -> (f64, Vec<f64>) {
    let (values, vectors) = symmetric_eigen(&combine(velocities, x).to_matrix());
    let v = vectors.column(0).into_owned();
    let grad = velocities
        .iter()
        .map(|w| {
            let m = w.to_matrix();
            v.dot(&(&m * &v))
        })
        .collect();
    (values[0], grad)
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

fn ascend(velocities: &[SymmetricMatrix], start: Vec<f64>, iterations: usize) -> (Vec<f64>, f64) {
    let mut x = start;
    normalize(&mut x);
    let (mut best_val, _) = objective(velocities, &x);
    let mut best = x.clone();
    for k in 1..=iterations {
        let (val, grad) = objective(velocities, &x);
        if val > best_val {
            best_val = val;
            best = x.clone();
        }
        // tangential part only: the radial part is `λ_min · x` by homogeneity
        let radial: f64 = grad.iter().zip(&x).map(|(g, xi)| g * xi).sum();
        let tangent: Vec<f64> = grad.iter().zip(&x).map(|(g, xi)| g - radial * xi).collect();
        let tnorm = tangent.iter().map(|g| g * g).sum::<f64>().sqrt();
        if tnorm <= 1e-15 * (1.0 + radial.abs()) {
            break;
        }
        let step = 1.0 / k as f64;
        for (xi, ti) in x.iter_mut().zip(&tangent) {
            *xi += step * ti / tnorm;
        }
        normalize(&mut x);
    }
    let (val, _) = objective(velocities, &x);
    if val > best_val {
        (x, val)
    } else {
        (best, best_val)
    }
}

fn grid_oracle(velocities: &[SymmetricMatrix]) -> Option<(Vec<f64>, f64)> {
    match velocities.len() {
        1 => [1.0, -1.0]
            .into_iter()
            .map(|s| (vec![s], objective(velocities, &[s]).0))
            .max_by(|a, b| a.1.total_cmp(&b.1)),
        2 => (0..GRID_POINTS)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / GRID_POINTS as f64;
                let x = vec![t.cos(), t.sin()];
                let v = objective(velocities, &x).0;
                (x, v)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1)),
        _ => None,
    }
}

/// Maximizes `λ_min` of the Gram velocity over unit coefficient vectors.
///
/// Restarts are seeded individually from `budget.seed`, so results do not depend on
/// evaluation order. For spaces of dimension one or two the result is cross-checked
/// against an exhaustive angular grid; if the grid beats the ascent by more than the
/// grid's own resolution, the budget was too small and `BudgetExhausted` is returned.
pub fn strict_direction(
    space: &DeformationSpace,
    tol: Tolerance,
    budget: SearchBudget,
) -> Result<StrictDirection> {
    if space.dof == 0 {
        return Err(Error::NoDegreesOfFreedom);
    }
    let velocities = space.gram_velocities();
    let f = velocities.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for r in 0..budget.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(r as u64));
        let start: Vec<f64> = if r == 0 {
            // the all-equal direction first
            vec![1.0; f]
        } else {
            (0..f).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let cand = ascend(&velocities, start, budget.iterations);
        if best.as_ref().is_none_or(|b| cand.1 > b.1) {
            best = Some(cand);
        }
    }
    let (mut x, mut lambda) = best.expect("at least one restart");
    let grid = grid_oracle(&velocities);
    if let Some((gx, gval)) = &grid {
        let scale = velocities
            .iter()
            .map(|w| w.frobenius_norm())
            .fold(0.0, f64::max);
        // half a grid step moves λ_min by at most ~ scale * π / 720
        let slack = scale * std::f64::consts::PI / GRID_POINTS as f64;
        if *gval > lambda + slack {
            return Err(Error::BudgetExhausted {
                best_coefficients: x,
                best_lambda_min: lambda,
                oracle_lambda_min: *gval,
            });
        }
        if *gval > lambda {
            x = gx.clone();
            lambda = *gval;
        }
    }
    let combined = combine(&velocities, &x);
    let v = verdict(&combined, tol);
    Ok(StrictDirection {
        found: v.kind == VerdictKind::StrictlyAuxetic,
        coefficients: x,
        lambda_min: lambda,
        eigenvalues: v.eigenvalues,
        grid_lambda_min: grid.map(|g| g.1),
        seed: budget.seed,
    })
}

/// Best `λ_min` over unit vectors by brute-force sampling; test helper.
#[doc(hidden)]
pub fn sampled_lambda_min(velocities: &[SymmetricMatrix], samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = velocities.len();
    (0..samples)
        .map(|_| {
            let mut x: Vec<f64> = (0..f).map(|_| rng.random_range(-1.0..1.0)).collect();
            normalize(&mut x);
            objective(velocities, &x).0
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
