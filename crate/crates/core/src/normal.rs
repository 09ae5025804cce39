//! Standard normal tail functions.
//!
//! Everything is routed through `erfc`, which keeps full relative accuracy
//! deep into the upper tail. Computing `1 - cdf(x)` directly loses all
//! significant digits once `x` exceeds about 8.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `Ψ̄⁻¹(1/2)`: the point where the two-sided null tail `P(|N(0,1)| ≥ t)`
/// equals one half, i.e. the upper quartile of the standard normal.
pub const PSI_BAR_INV_HALF: f64 = 0.674_489_750_196_081_7;

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF `Φ(x)`.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival `Φ̄(x) = 1 - Φ(x)`.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Two-sided p-value `P(|N(0,1)| ≥ |z|)`.
pub fn two_sided_pvalue(z: f64) -> f64 {
    libm::erfc(z.abs() * FRAC_1_SQRT_2)
}

/// Folded-normal survival `Ψ̄_τ(t) = P(|N(τ,1)| > t)` for `t ≥ 0`.
///
/// Written as `Φ̄(t - τ) + Φ̄(t + τ)`, which equals
/// `1 - [Φ(t - τ) - Φ(-t - τ)]` without the cancellation.
pub fn folded_sf(t: f64, tau: f64) -> f64 {
    sf(t - tau) + sf(t + tau)
}

/// Null folded survival `Ψ̄(t) = Ψ̄_0(t)`.
pub fn folded_sf_null(t: f64) -> f64 {
    libm::erfc(t * FRAC_1_SQRT_2)
}
