use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, HctError, Result};

/// Rare/weak calibration of one classification problem.
///
/// The experiments fix `(p, n, ε_p, τ_p)` as literals, while the asymptotic
/// theory ties them to `p` through exponents `(β, r, θ)`. Both entry points
/// produce the same struct; the exponents are `None` when literals were given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RareWeakParams {
    pub p: usize,
    pub n: usize,
    /// Signal fraction `ε_p`.
    pub eps: f64,
    /// Signal strength `τ_p` of the scaled mean `√n·μ(j)`.
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl RareWeakParams {
    /// `ε_p = p^{-β}`, `n_p = max(2, round(p^θ))`, `τ_p = √(2 r ln p)`.
    pub fn from_exponents(p: usize, beta: f64, r: f64, theta: f64) -> Result<Self> {
        check_p(p)?;
        check_open_unit("beta", beta)?;
        check_open_unit("r", r)?;
        check_open_unit("theta", theta)?;
        let pf = p as f64;
        let n = (pf.powf(theta).round() as usize).max(2);
        Ok(Self {
            p,
            n,
            eps: pf.powf(-beta),
            tau: (2.0 * r * pf.ln()).sqrt(),
            beta: Some(beta),
            r: Some(r),
            theta: Some(theta),
        })
    }

    /// Literal parameterisation used by the simulation experiments.
    pub fn from_literals(p: usize, n: usize, eps: f64, tau: f64) -> Result<Self> {
        check_p(p)?;
        if n == 0 {
            return Err(HctError::Domain {
                name: "n",
                value: 0.0,
                domain: "n ≥ 1".into(),
            });
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(HctError::Domain {
                name: "eps",
                value: eps,
                domain: "[0, 1]".into(),
            });
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(HctError::Domain {
                name: "tau",
                value: tau,
                domain: "(0, ∞)".into(),
            });
        }
        Ok(Self {
            p,
            n,
            eps,
            tau,
            beta: None,
            r: None,
            theta: None,
        })
    }

    /// `s_p* = √(2 ln p)`, the largest threshold worth considering.
    pub fn s_star(&self) -> f64 {
        s_star(self.p)
    }

    /// `s̃_{p,n} = √(2 max{0, ln(p / n²)})`, the smallest admissible threshold.
    pub fn s_tilde(&self) -> f64 {
        s_tilde(self.p, self.n)
    }

    /// `s_p(θ) = √(2 max{1 - 2θ, 0} ln p)`, the exact-`n_p` counterpart of `s̃`.
    pub fn s_theta(&self) -> Option<f64> {
        self.theta
            .map(|th| (2.0 * (1.0 - 2.0 * th).max(0.0) * (self.p as f64).ln()).sqrt())
    }

    /// Expected number of signals `p·ε_p`.
    pub fn expected_signals(&self) -> f64 {
        self.p as f64 * self.eps
    }
}

/// Alias for [`RareWeakParams::from_exponents`].
pub fn derive_params(p: usize, beta: f64, r: f64, theta: f64) -> Result<RareWeakParams> {
    RareWeakParams::from_exponents(p, beta, r, theta)
}

pub fn s_star(p: usize) -> f64 {
    (2.0 * (p as f64).ln()).sqrt()
}

pub fn s_tilde(p: usize, n: usize) -> f64 {
    let ratio = p as f64 / (n as f64 * n as f64);
    (2.0 * ratio.ln().max(0.0)).sqrt()
}

fn check_p(p: usize) -> Result<()> {
    if p < 2 {
        return Err(HctError::Domain {
            name: "p",
            value: p as f64,
            domain: "p ≥ 2".into(),
        });
    }
    Ok(())
}
