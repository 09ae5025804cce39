//! Phase boundaries, threshold functionals and separation proxies.
//!
//! Closed forms are used wherever `Ω = I`; for general `Ω` the population
//! expectations are estimated by Monte Carlo, one random stream per
//! repetition, and summed in repetition order.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_open_unit, HctError, Result};
use crate::hct::clip_estimate;
use crate::linalg::EnvelopeCholesky;
use crate::matrix::SparseSymMatrix;
use crate::model::{sample_mu, RareWeakParams, SignalSpec};
use crate::normal::{folded_sf, folded_sf_null, sf, PSI_BAR_INV_HALF};
use crate::rng::substream;

/// Absolute tolerance of every argmax search in this module.
pub const ARGMAX_TOL: f64 = 1e-4;
const PRESCAN_POINTS: usize = 400;

/// Standard phase boundary `ρ(β)`.
pub fn rho(beta: f64) -> Result<f64> {
    check_open_unit("beta", beta)?;
    Ok(if beta <= 0.5 {
        0.0
    } else if beta < 0.75 {
        beta - 0.5
    } else {
        (1.0 - (1.0 - beta).sqrt()).powi(2)
    })
}

/// `ρ*_θ(β) = (1 - θ)·ρ(β / (1 - θ))` on `(1 - θ)/2 ≤ β < 1 - θ`.
pub fn rho_star(beta: f64, theta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(HctError::Domain {
            name: "theta",
            value: theta,
            domain: "[0, 1)".into(),
        });
    }
    let lo = (1.0 - theta) / 2.0;
    let hi = 1.0 - theta;
    if !(beta >= lo && beta < hi) {
        return Err(HctError::Domain {
            name: "beta",
            value: beta,
            domain: format!("[{lo}, {hi}) for theta = {theta}"),
        });
    }
    Ok((1.0 - theta) * rho(beta / (1.0 - theta))?)
}

/// Exponent `δ(β, r)` of `sup_t W̃₀(t)`.
pub fn delta(beta: f64, r: f64) -> Result<f64> {
    check_open_unit("beta", beta)?;
    check_open_unit("r", r)?;
    Ok(if r <= beta / 3.0 {
        beta - r
    } else if r < beta {
        (beta + r).powi(2) / (8.0 * r)
    } else {
        beta / 2.0
    })
}

/// `t*_p = min{2, (r + β)/(2r)}·τ_p`.
pub fn t_star(beta: f64, r: f64, tau: f64) -> Result<f64> {
    check_open_unit("beta", beta)?;
    check_open_unit("r", r)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(HctError::Domain {
            name: "tau",
            value: tau,
            domain: "(0, ∞)".into(),
        });
    }
    Ok(((r + beta) / (2.0 * r)).min(2.0) * tau)
}

/// Folded-normal survival `Ψ̄_τ(t) = P(|N(τ, 1)| > t)`.
pub fn psi_bar(t: f64, tau: f64) -> f64 {
    folded_sf(t, tau)
}

/// `W̃₀(t) = ε Ψ̄_τ(t) / √(Ψ̄(t) + ε Ψ̄_τ(t))`.
pub fn w0_tilde(t: f64, eps: f64, tau: f64) -> f64 {
    let s = eps * folded_sf(t, tau);
    if s == 0.0 {
        return 0.0;
    }
    s / (folded_sf_null(t) + s).sqrt()
}

/// `Δ₁ = ln(ln p)/√(ln p)` (unit constant), the slack of the threshold
/// bracket when `r ≥ β`.
pub fn delta1(p: usize) -> f64 {
    let l = (p as f64).ln();
    l.ln() / l.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Argmax {
    pub t: f64,
    pub value: f64,
    /// The prescan saw more than one local maximum.
    pub multimodal: bool,
}

/// Maximises `f` on `(lo, hi)`: a uniform prescan picks the best cell, then
/// golden-section search refines inside the neighbouring cells.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Argmax {
    let n = PRESCAN_POINTS;
    let h = (hi - lo) / n as f64;
    // interior points only; the interval is open
    let ts: Vec<f64> = (1..n).map(|k| lo + k as f64 * h).collect();
    let vs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let mut best = 0;
    for k in 1..vs.len() {
        if vs[k] > vs[best] {
            best = k;
        }
    }
    let peaks = (0..vs.len())
        .filter(|&k| {
            let left = k == 0 || vs[k] > vs[k - 1];
            let right = k + 1 == vs.len() || vs[k] >= vs[k + 1];
            left && right
        })
        .count();
    let mut a = if best == 0 { lo } else { ts[best - 1] };
    let mut b = if best + 1 == ts.len() { hi } else { ts[best + 1] };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > ARGMAX_TOL * 1e-2 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let v = f(t);
    let (t, value) = if v >= vs[best] { (t, v) } else { (ts[best], vs[best]) };
    Argmax {
        t,
        value,
        multimodal: peaks > 1,
    }
}

/// Maximiser of `W̃₀` over `(0, s*)`.
pub fn ideal_threshold(eps: f64, tau: f64, s_star: f64) -> Argmax {
    maximize(|t| w0_tilde(t, eps, tau), 0.0, s_star)
}

/// Inputs of the conditional separation of a clipped classifier.
#[derive(Debug, Clone, Copy)]
pub struct SepInputs<'a> {
    pub t: f64,
    /// The thresholded vector (`Ẑ` or `Z̃`).
    pub z_used: &'a [f64],
    /// True contrast mean `μ`.
    pub mu: &'a [f64],
    /// Weighting matrix (`Ω̂` or `Ω`).
    pub a: &'a SparseSymMatrix,
    /// Cholesky factor of the true `Ω`.
    pub omega_chol: &'a EnvelopeCholesky,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub m: f64,
    pub v: f64,
    pub sep: f64,
    /// Nothing was selected, so `V = 0` and `Sep` is reported as 0.
    pub empty: bool,
}

impl Separation {
    /// Misclassification probability `Φ̄(Sep/2)` of the linear rule.
    pub fn error_rate(&self) -> f64 {
        if self.empty {
            0.5
        } else {
            sf(self.sep / 2.0)
        }
    }
}

/// `M = μ̂ᵀ A μ`, `V = μ̂ᵀ A Ω⁻¹ A μ̂`, `Sep = 2M/√V` with `μ̂` clipped at `t`.
pub fn m_v_sep(inputs: &SepInputs<'_>) -> Result<Separation> {
    let p = inputs.a.dim();
    check_dim(p, inputs.z_used.len())?;
    check_dim(p, inputs.mu.len())?;
    check_dim(p, inputs.omega_chol.dim())?;
    let mu_hat = clip_estimate(inputs.z_used, inputs.t);
    let w = inputs.a.matvec(&mu_hat);
    let m: f64 = w.iter().zip(inputs.mu).map(|(a, b)| a * b).sum();
    let sw = inputs.omega_chol.solve(&w);
    let v: f64 = w.iter().zip(&sw).map(|(a, b)| a * b).sum();
    if !(v > 0.0) {
        return Ok(Separation {
            m,
            v,
            sep: 0.0,
            empty: true,
        });
    }
    Ok(Separation {
        m,
        v,
        sep: 2.0 * m / v.sqrt(),
        empty: false,
    })
}

/// Monte Carlo summary of a population separation proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SepEstimate {
    pub m: f64,
    pub v: f64,
    pub m_se: f64,
    pub v_se: f64,
    pub sep: f64,
    pub degenerate: bool,
}

/// `√n Ω μ + L ξ`: a draw of `Z̃ = ΩZ` given `μ`.
fn draw_z_tilde(omega: &SparseSymMatrix, chol: &EnvelopeCholesky, mu: &[f64], n: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    let root_n = (n as f64).sqrt();
    let xi: Vec<f64> = (0..mu.len()).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let noise = chol.mul_lower(&xi);
    omega
        .matvec(mu)
        .iter()
        .zip(noise)
        .map(|(m, e)| root_n * m + e)
        .collect()
}

/// Pairwise sum; the split points depend only on the length.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `S̃ep(t) = 2 m_p / √v_p` where `m_p = E[μ̂ᵀΩμ]` and `v_p = E[μ̂ᵀΩμ̂]`,
/// `μ̂` clipping `Z̃ = ΩZ` at `t`, estimated over `reps` fresh `(μ, Z)`.
pub fn sep_tilde(
    t: f64,
    params: &RareWeakParams,
    omega: &SparseSymMatrix,
    signal: &SignalSpec,
    reps: usize,
    seed: u64,
) -> Result<SepEstimate> {
    if reps == 0 {
        return Err(HctError::Config("reps must be at least 1".into()));
    }
    check_dim(params.p, omega.dim())?;
    signal.validate()?;
    let chol = omega.cholesky()?;
    let draws: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let mu = sample_mu(params, signal, &mut rng).expect("validated signal").mu;
            let zt = draw_z_tilde(omega, &chol, &mu, params.n, &mut rng);
            let mu_hat = clip_estimate(&zt, t);
            let w = omega.matvec(&mu_hat);
            let m = w.iter().zip(&mu).map(|(a, b)| a * b).sum::<f64>();
            let v = w.iter().zip(&mu_hat).map(|(a, b)| a * b).sum::<f64>();
            (m, v)
        })
        .collect();
    let ms: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let vs: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let (m, m_se) = mean_se(&ms);
    let (v, v_se) = mean_se(&vs);
    let degenerate = !(v > 0.0);
    Ok(SepEstimate {
        m,
        v,
        m_se,
        v_se,
        sep: if degenerate { 0.0 } else { 2.0 * m / v.sqrt() },
        degenerate,
    })
}

/// Exact `(m_p, v_p)` at `Ω = I` with point-mass signals of strength `τ`.
pub fn sep_tilde_identity(t: f64, p: usize, n: usize, eps: f64, tau: f64) -> (f64, f64) {
    let pf = p as f64;
    let m = pf * eps * tau / (n as f64).sqrt() * (sf(t - tau) - sf(t + tau));
    let v = pf * ((1.0 - eps) * folded_sf_null(t) + eps * folded_sf(t, tau));
    (m, v)
}

/// `HC(t, G) = √p (G(t) - Ψ̄(t)) / √(G(t)(1 - G(t)))` with `G` kept inside
/// `[1/p, 1 - 1/p]`.
pub fn hc_functional(t: f64, g: f64, p: usize) -> f64 {
    let floor = 1.0 / p as f64;
    let g = g.max(floor).min(1.0 - floor);
    (p as f64).sqrt() * (g - folded_sf_null(t)) / (g * (1.0 - g)).sqrt()
}

/// Survival functions fed to the HC functional.
#[derive(Debug, Clone, PartialEq)]
pub enum Survival {
    /// `(1 - ε)Ψ̄(t) + ε Ψ̄_τ(t)`.
    Mixture { eps: f64, tau: f64 },
    /// `G(t) = #{x ≥ t} / len`, with the values sorted descending.
    Empirical { sorted_desc: Vec<f64> },
}

impl Survival {
    pub fn empirical(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        Survival::Empirical { sorted_desc: v }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Survival::Mixture { eps, tau } => (1.0 - eps) * folded_sf_null(t) + eps * folded_sf(t, *tau),
            Survival::Empirical { sorted_desc } => {
                sorted_desc.partition_point(|&x| x >= t) as f64 / sorted_desc.len() as f64
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealHct {
    pub t: f64,
    pub hc: f64,
    /// No signal, so the functional is identically zero and `t = s*`.
    pub null: bool,
}

/// `argmax HC(t, G)` over `Ψ̄⁻¹(1/2) < t < s*`. A step function `G` is
/// maximised at its jump points, which is where its supremum is attained.
pub fn hc_argmax(survival: &Survival, p: usize, s_star: f64) -> IdealHct {
    match survival {
        Survival::Mixture { eps, .. } if *eps == 0.0 => IdealHct {
            t: s_star,
            hc: 0.0,
            null: true,
        },
        Survival::Mixture { .. } => {
            let a = maximize(|t| hc_functional(t, survival.eval(t), p), PSI_BAR_INV_HALF, s_star);
            IdealHct {
                t: a.t,
                hc: a.value,
                null: false,
            }
        }
        Survival::Empirical { sorted_desc } => {
            let total = sorted_desc.len() as f64;
            let mut best: Option<(f64, f64)> = None;
            for (k, &x) in sorted_desc.iter().enumerate() {
                if !(x > PSI_BAR_INV_HALF && x < s_star) {
                    continue;
                }
                // G(x) counts every value ≥ x, ties included
                let mut c = k + 1;
                while c < sorted_desc.len() && sorted_desc[c] == x {
                    c += 1;
                }
                let v = hc_functional(x, c as f64 / total, p);
                if best.is_none_or(|b| v > b.1) {
                    best = Some((x, v));
                }
            }
            match best {
                Some((t, hc)) => IdealHct { t, hc, null: false },
                None => IdealHct {
                    t: s_star,
                    hc: 0.0,
                    null: true,
                },
            }
        }
    }
}

/// Pooled `|Z̃|` over `reps` draws, an estimate of the population survival.
pub fn survival_mc(
    params: &RareWeakParams,
    omega: &SparseSymMatrix,
    signal: &SignalSpec,
    reps: usize,
    seed: u64,
) -> Result<Survival> {
    if reps == 0 {
        return Err(HctError::Config("reps must be at least 1".into()));
    }
    check_dim(params.p, omega.dim())?;
    signal.validate()?;
    let chol = omega.cholesky()?;
    let draws: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let mu = sample_mu(params, signal, &mut rng).expect("validated signal").mu;
            draw_z_tilde(omega, &chol, &mu, params.n, &mut rng)
        })
        .collect();
    Ok(Survival::empirical(&draws.concat()))
}

/// Ideal HCT. At `Ω = I` with point-mass signals the population survival is
/// the closed-form mixture; otherwise it is estimated from `reps` draws.
pub fn ideal_hct(
    params: &RareWeakParams,
    omega: &SparseSymMatrix,
    signal: &SignalSpec,
    reps: usize,
    seed: u64,
) -> Result<IdealHct> {
    let s_star = params.s_star();
    if params.eps == 0.0 {
        return Ok(IdealHct {
            t: s_star,
            hc: 0.0,
            null: true,
        });
    }
    let closed = omega.is_identity() && *signal == SignalSpec::default();
    let survival = if closed {
        Survival::Mixture {
            eps: params.eps,
            tau: params.tau,
        }
    } else {
        survival_mc(params, omega, signal, reps, seed)?
    };
    Ok(hc_argmax(&survival, params.p, s_star))
}

/// Monte Carlo estimate of `g₁(t) = (1/p) Σ_j P(|Z̃(j)| ≥ t, some neighbour
/// of j carries a signal)` at each `t`, all from one set of draws.
pub fn g1_curve(
    ts: &[f64],
    params: &RareWeakParams,
    omega: &SparseSymMatrix,
    signal: &SignalSpec,
    reps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_dim(params.p, omega.dim())?;
    signal.validate()?;
    let p = params.p;
    let has_edges = (0..p).any(|j| !omega.off_diagonal_row(j).is_empty());
    if !has_edges || params.eps == 0.0 {
        return Ok(vec![0.0; ts.len()]);
    }
    if reps == 0 {
        return Err(HctError::Config("reps must be at least 1".into()));
    }
    let chol = omega.cholesky()?;
    let counts: Vec<Vec<u64>> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let mu = sample_mu(params, signal, &mut rng).expect("validated signal").mu;
            let zt = draw_z_tilde(omega, &chol, &mu, params.n, &mut rng);
            let mut c = vec![0u64; ts.len()];
            for j in 0..p {
                if omega.off_diagonal_row(j).iter().any(|&(k, _)| mu[k] != 0.0) {
                    let a = zt[j].abs();
                    for (ci, &t) in c.iter_mut().zip(ts) {
                        if a >= t {
                            *ci += 1;
                        }
                    }
                }
            }
            c
        })
        .collect();
    let denom = (reps * p) as f64;
    Ok((0..ts.len())
        .map(|i| counts.iter().map(|c| c[i]).sum::<u64>() as f64 / denom)
        .collect())
}

/// `W₀(t) = (ε Ψ̄_τ + g₁)/√(Ψ̄ + ε Ψ̄_τ + g₁)` at each `t`.
pub fn w0_full_curve(
    ts: &[f64],
    params: &RareWeakParams,
    omega: &SparseSymMatrix,
    signal: &SignalSpec,
    reps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let g1 = g1_curve(ts, params, omega, signal, reps, seed)?;
    Ok(ts
        .iter()
        .zip(g1)
        .map(|(&t, g)| {
            let s = params.eps * folded_sf(t, params.tau) + g;
            if s == 0.0 {
                0.0
            } else {
                s / (folded_sf_null(t) + s).sqrt()
            }
        })
        .collect())
}

pub fn w0_full(
    t: f64,
    params: &RareWeakParams,
    omega: &SparseSymMatrix,
    signal: &SignalSpec,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    Ok(w0_full_curve(&[t], params, omega, signal, reps, seed)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `β < (1 - θ)/2`: signals are dense relative to `n`.
    RelativelyDense,
    /// `β > 1 - θ`: signals are sparse relative to `n`.
    RelativelySparse,
    Possible,
    Impossible,
    Boundary,
}

/// Which side of `r = ρ*_θ(β)` a point lies on, or which end of the
/// rare/weak strip it falls off.
pub fn regime_classify(beta: f64, r: f64, theta: f64) -> Result<Regime> {
    check_open_unit("beta", beta)?;
    check_open_unit("r", r)?;
    check_open_unit("theta", theta)?;
    if beta < (1.0 - theta) / 2.0 {
        return Ok(Regime::RelativelyDense);
    }
    if beta >= 1.0 - theta {
        return Ok(Regime::RelativelySparse);
    }
    let b = rho_star(beta, theta)?;
    Ok(if (r - b).abs() <= 1e-12 {
        Regime::Boundary
    } else if r > b {
        Regime::Possible
    } else {
        Regime::Impossible
    })
}

/// One row of the exported functional curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub t: f64,
    pub w0_tilde: f64,
    pub w0: f64,
    pub sep_tilde: f64,
    pub hc: f64,
}

/// `W̃₀`, `W₀`, `S̃ep` and the population HC functional on a grid of `t`.
pub fn functional_curves(
    ts: &[f64],
    params: &RareWeakParams,
    omega: &SparseSymMatrix,
    signal: &SignalSpec,
    reps: usize,
    seed: u64,
) -> Result<Vec<CurveRow>> {
    let w0 = w0_full_curve(ts, params, omega, signal, reps, seed)?;
    let closed = omega.is_identity() && *signal == SignalSpec::default();
    let survival = if closed {
        Survival::Mixture {
            eps: params.eps,
            tau: params.tau,
        }
    } else {
        survival_mc(params, omega, signal, reps, seed)?
    };
    ts.iter()
        .zip(w0)
        .enumerate()
        .map(|(k, (&t, w0))| {
            let sep = if closed {
                let (m, v) = sep_tilde_identity(t, params.p, params.n, params.eps, params.tau);
                if v > 0.0 { 2.0 * m / v.sqrt() } else { 0.0 }
            } else {
                sep_tilde(t, params, omega, signal, reps, seed ^ (k as u64).wrapping_mul(0x9E37))?.sep
            };
            Ok(CurveRow {
                t,
                w0_tilde: w0_tilde(t, params.eps, params.tau),
                w0,
                sep_tilde: sep,
                hc: hc_functional(t, survival.eval(t), params.p),
            })
        })
        .collect()
}

pub fn write_curves_csv<W: Write>(rows: &[CurveRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_examples() {
        assert_eq!(rho(0.5).unwrap(), 0.0);
        assert!((rho(0.6).unwrap() - 0.1).abs() < 1e-15);
        assert!((rho(0.75).unwrap() - 0.25).abs() < 1e-15);
        assert!(rho(1.0).is_err());
    }

    #[test]
    fn rho_star_examples() {
        assert!((rho_star(0.45, 0.25).unwrap() - 0.075).abs() < 1e-15);
        assert_eq!(rho_star(0.375, 0.25).unwrap(), 0.0);
        assert_eq!(rho_star(0.6, 0.0).unwrap(), rho(0.6).unwrap());
        assert!(rho_star(0.3, 0.25).is_err());
    }

    #[test]
    fn delta_and_t_star_examples() {
        assert!((delta(0.6, 0.1).unwrap() - 0.5).abs() < 1e-15);
        assert!((delta(0.6, 0.3).unwrap() - 0.3375).abs() < 1e-15);
        assert!((t_star(0.6, 0.3, 2.0).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(t_star(0.6, 0.1, 2.0).unwrap(), 4.0);
        assert_eq!(t_star(0.4, 0.4, 2.5).unwrap(), 2.5);
    }

    #[test]
    fn w0_tilde_edges() {
        assert_eq!(w0_tilde(1.0, 0.0, 3.0), 0.0);
        assert!((w0_tilde(0.0, 0.2, 3.0) - 0.2 / 1.2_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn maximize_finds_parabola_peak() {
        let a = maximize(|t| -(t - 1.234).powi(2), 0.0, 3.0);
        assert!((a.t - 1.234).abs() < ARGMAX_TOL);
        assert!(!a.multimodal);
    }

    #[test]
    fn separation_of_exact_recovery() {
        let eye = SparseSymMatrix::identity(4);
        let chol = eye.cholesky().unwrap();
        let mu = [1.0, -1.0, 0.0, 1.0];
        let s = m_v_sep(&SepInputs { t: 0.5, z_used: &mu, mu: &mu, a: &eye, omega_chol: &chol }).unwrap();
        assert_eq!((s.m, s.v), (3.0, 3.0));
        assert!((s.sep - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        let zero = [0.0; 4];
        let s = m_v_sep(&SepInputs { t: 0.5, z_used: &zero, mu: &mu, a: &eye, omega_chol: &chol }).unwrap();
        assert!(s.empty);
        assert_eq!(s.sep, 0.0);
    }

    #[test]
    fn hc_functional_null_is_zero() {
        for t in [0.5, 1.0, 2.0, 3.0] {
            assert!(hc_functional(t, folded_sf_null(t), 1000).abs() < 1e-12);
        }
        assert!(hc_functional(1.0, 1.0, 100).is_finite());
        assert!(hc_functional(5.0, 0.0, 100).is_finite());
    }

    #[test]
    fn regimes() {
        assert_eq!(regime_classify(0.45, 0.5, 0.25).unwrap(), Regime::Possible);
        assert_eq!(regime_classify(0.45, 0.05, 0.25).unwrap(), Regime::Impossible);
        assert_eq!(regime_classify(0.2, 0.5, 0.25).unwrap(), Regime::RelativelyDense);
        assert_eq!(regime_classify(0.8, 0.5, 0.25).unwrap(), Regime::RelativelySparse);
    }

    #[test]
    fn identity_w0_full_equals_w0_tilde() {
        let params = RareWeakParams::from_literals(200, 10, 0.05, 2.0).unwrap();
        let eye = SparseSymMatrix::identity(200);
        let ts = [0.5, 1.0, 2.0];
        let full = w0_full_curve(&ts, &params, &eye, &SignalSpec::default(), 3, 1).unwrap();
        for (t, w) in ts.iter().zip(full) {
            assert_eq!(w, w0_tilde(*t, 0.05, 2.0));
        }
    }

    #[test]
    fn null_ideal_hct_returns_s_star() {
        let params = RareWeakParams::from_literals(1000, 10, 0.0, 2.0).unwrap();
        let r = ideal_hct(&params, &SparseSymMatrix::identity(1000), &SignalSpec::default(), 1, 0).unwrap();
        assert!(r.null);
        assert_eq!(r.t, params.s_star());
    }
}
