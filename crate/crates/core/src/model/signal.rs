use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HctError, Result};
use crate::model::params::RareWeakParams;

/// Law `H_p` of the scaled nonzero means `√n·μ(j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalDistribution {
    /// Point mass at `τ_p` (taken from the params).
    PointMass,
    /// Uniform on `[lo, hi]` with `0 < lo < hi`.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPolicy {
    #[default]
    Positive,
    /// Each signal is negated with probability 1/2.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    #[serde(flatten)]
    pub dist: SignalDistribution,
    #[serde(default)]
    pub sign: SignPolicy,
}

impl Default for SignalSpec {
    fn default() -> Self {
        Self {
            dist: SignalDistribution::PointMass,
            sign: SignPolicy::Positive,
        }
    }
}

impl SignalSpec {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        Self {
            dist: SignalDistribution::Uniform { lo, hi },
            sign: SignPolicy::Positive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SignalDistribution::Uniform { lo, hi } = self.dist {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(HctError::Config(format!(
                    "uniform signal law needs 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// A drawn contrast mean and its support.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalDraw {
    pub mu: Vec<f64>,
    /// Indices `j` with `μ(j) ≠ 0`, ascending.
    pub support: Vec<usize>,
}

/// Draws `μ` with `√n·μ(j)` i.i.d. from `(1 - ε)ν₀ + ε·H_p`.
pub fn sample_mu<R: Rng + ?Sized>(
    params: &RareWeakParams,
    signal: &SignalSpec,
    rng: &mut R,
) -> Result<SignalDraw> {
    signal.validate()?;
    let scale = 1.0 / (params.n as f64).sqrt();
    let mut mu = vec![0.0; params.p];
    let mut support = Vec::new();
    for (j, m) in mu.iter_mut().enumerate() {
        // one uniform per coordinate decides membership, so the support is
        // the same for every signal law under a fixed seed
        if rng.random::<f64>() >= params.eps {
            continue;
        }
        let mut v = match signal.dist {
            SignalDistribution::PointMass => params.tau,
            SignalDistribution::Uniform { lo, hi } => rng.random_range(lo..=hi),
        };
        if signal.sign == SignPolicy::Symmetric && rng.random::<bool>() {
            v = -v;
        }
        *m = v * scale;
        support.push(j);
    }
    Ok(SignalDraw { mu, support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn no_signals_when_eps_is_zero() {
        let params = RareWeakParams::from_literals(100, 4, 0.0, 3.0).unwrap();
        let d = sample_mu(&params, &SignalSpec::default(), &mut substream(1, 0)).unwrap();
        assert!(d.mu.iter().all(|&v| v == 0.0));
        assert!(d.support.is_empty());
    }

    #[test]
    fn all_signals_when_eps_is_one() {
        let params = RareWeakParams::from_literals(50, 4, 1.0, 3.0).unwrap();
        let d = sample_mu(&params, &SignalSpec::default(), &mut substream(1, 0)).unwrap();
        assert!(d.mu.iter().all(|&v| v == 1.5));
        assert_eq!(d.support.len(), 50);
    }

    #[test]
    fn support_fraction_concentrates() {
        // sd of the fraction is sqrt(0.09 / 1e5) ≈ 0.00095; 0.005 is over 5 sd
        let params = RareWeakParams::from_literals(100_000, 10, 0.1, 2.0).unwrap();
        let d = sample_mu(&params, &SignalSpec::default(), &mut substream(9, 2)).unwrap();
        let frac = d.support.len() as f64 / 1e5;
        assert!((frac - 0.1).abs() < 0.005, "{frac}");
    }

    #[test]
    fn uniform_law_stays_in_range() {
        let params = RareWeakParams::from_literals(2000, 100, 0.5, 3.0).unwrap();
        let spec = SignalSpec::uniform(2.5, 3.5);
        let d = sample_mu(&params, &spec, &mut substream(3, 0)).unwrap();
        for &j in &d.support {
            let v = d.mu[j] * 10.0;
            assert!((2.5..=3.5).contains(&v));
        }
    }

    #[test]
    fn uniform_with_mass_at_zero_is_rejected() {
        let params = RareWeakParams::from_literals(10, 4, 0.5, 3.0).unwrap();
        let spec = SignalSpec::uniform(0.0, 1.0);
        assert!(sample_mu(&params, &spec, &mut substream(3, 0)).is_err());
    }
}
