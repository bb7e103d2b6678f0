//! Independent closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use periodica::constructors::LkParams;

/// The double arrowhead `(0,0), (x, y1), (2x, 0), (x, y3)` with legs `√2` and `b = |(1, g)|`,
/// parametrized by the angle `φ` of the short legs from the vertical:
/// `x = b sin φ`, `y3 = b cos φ`, `y1 = √(2 − x²)`.
pub struct Arrowhead {
    pub b: f64,
}

impl Arrowhead {
    pub fn standard() -> Self {
        Arrowhead { b: (1.0f64 + 0.4 * 0.4).sqrt() }
    }

    pub fn phi0(&self) -> f64 {
        1.0f64.atan2(0.4)
    }

    /// `(p_0, p_1, λ_1, λ_2)` flattened: `(0, 0, x, y1, 2x, 0, 0, y1 − y3)`.
    pub fn state(&self, phi: f64) -> [f64; 8] {
        let x = self.b * phi.sin();
        let y3 = self.b * phi.cos();
        let y1 = (2.0 - x * x).sqrt();
        [0.0, 0.0, x, y1, 2.0 * x, 0.0, 0.0, y1 - y3]
    }

    /// `‖dX/dφ‖`; this parametrization already satisfies the gauge.
    pub fn speed(&self, phi: f64) -> f64 {
        let x = self.b * phi.sin();
        let dx = self.b * phi.cos();
        let y1 = (2.0 - x * x).sqrt();
        let dy1 = -x * dx / y1;
        let dy3 = -self.b * phi.sin();
        (dx * dx + dy1 * dy1 + 4.0 * dx * dx + (dy1 - dy3).powi(2)).sqrt()
    }

    /// Arclength from the start to `phi` by composite Simpson.
    pub fn arclength(&self, phi: f64) -> f64 {
        let n = 20_000;
        let (a, h) = (self.phi0(), (phi - self.phi0()) / n as f64);
        (0..n)
            .map(|i| {
                let t = a + i as f64 * h;
                h / 6.0 * (self.speed(t) + 4.0 * self.speed(t + 0.5 * h) + self.speed(t + h))
            })
            .sum()
    }

    /// `dω_11/dφ = 8 x x'` changes sign where the reflex vertex reaches the diagonal;
    /// located by bisection rather than assumed.
    pub fn concavity_loss(&self) -> f64 {
        let rate = |phi: f64| 8.0 * self.b * phi.sin() * self.b * phi.cos();
        let (mut lo, mut hi) = (self.phi0(), FRAC_PI_2 + 0.3);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rate(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Radius of the `L_k` polygon circle recovered from the vertical period length
/// `v(r) = √(ℓ_2² − r²) − √(ℓ_1² − r²)`, which increases with `r`.
pub fn lk_radius_from_vertical(params: LkParams, v: f64) -> f64 {
    let (l1, l2) = params.bar_lengths();
    let vr = |r: f64| (l2 * l2 - r * r).sqrt() - (l1 * l1 - r * r).sqrt();
    let (mut lo, mut hi) = (0.0, l1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if vr(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `|λ_1| = |λ_2| = r √(2 − 2 cos θ)` with `θ = 2k asin(sin(π/3k)/r)`.
pub fn lk_horizontal_length(k: usize, r: f64) -> f64 {
    let a = (std::f64::consts::PI / (3 * k) as f64).sin();
    let theta = 2.0 * k as f64 * (a / r).asin();
    r * (2.0 - 2.0 * theta.cos()).sqrt()
}
