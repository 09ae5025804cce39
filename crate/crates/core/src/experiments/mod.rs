//! Simulation harness: presets, repeated train/test runs, phase sweeps and
//! result emission.

mod emit;
mod presets;
mod run;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::{CvConfig, OmegaSource};
use crate::error::{HctError, Result};
use crate::model::{OmegaSpec, RareWeakParams, SignalSpec};
use crate::precision_est::{EstimationConfig, ZetaMode};

pub use emit::{emit, format_sig, write_csv, write_json, write_plot, OutputFormat};
pub use presets::preset;
pub use run::{run_experiment, ResultRow, ResultTable};
pub use sweep::{phase_sweep, SweepConfig};

/// Default cap on dense `p × p` working memory for one repetition.
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Exp1a,
    Exp1b,
    Exp1c,
    Exp2a,
    Exp2b,
    Exp3,
    PhaseSweep,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Exp1a,
        Preset::Exp1b,
        Preset::Exp1c,
        Preset::Exp2a,
        Preset::Exp2b,
        Preset::Exp3,
        Preset::PhaseSweep,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Exp1a => "exp1a",
            Preset::Exp1b => "exp1b",
            Preset::Exp1c => "exp1c",
            Preset::Exp2a => "exp2a",
            Preset::Exp2b => "exp2b",
            Preset::Exp3 => "exp3",
            Preset::PhaseSweep => "phase_sweep",
            Preset::Custom => "custom",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = HctError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| HctError::Config(format!("unknown preset `{s}`")))
    }
}

/// Classifiers compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// IT with the estimated `Ω̂`.
    #[serde(rename = "HCT")]
    Hct,
    /// IT with the true `Ω`.
    #[serde(rename = "pHCT")]
    Phct,
    /// Correlation ignored: `Ω̂ = diag(1/Σ̂_jj)`, so `Ẑ(j) = Z(j)/√Σ̂_jj`.
    #[serde(rename = "oHCT")]
    Ohct,
    /// IT with a cross-validated threshold.
    #[serde(rename = "CVT")]
    Cvt,
    /// BT with the true `Ω`.
    #[serde(rename = "BT-HCT")]
    BtHct,
    /// WT with the true `Ω`.
    #[serde(rename = "WT-HCT")]
    WtHct,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Hct,
        Method::Phct,
        Method::Ohct,
        Method::Cvt,
        Method::BtHct,
        Method::WtHct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hct => "HCT",
            Method::Phct => "pHCT",
            Method::Ohct => "oHCT",
            Method::Cvt => "CVT",
            Method::BtHct => "BT-HCT",
            Method::WtHct => "WT-HCT",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HctError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HctError::Config(format!("unknown method `{s}`")))
    }
}

/// One parameter point. Either the literals `(n, eps, tau)` or the
/// exponents `(theta, beta, r)` must be given in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    /// Named coordinates written to the result rows, e.g. `[("a", 0.45)]`.
    #[serde(default)]
    pub coords: Vec<(String, f64)>,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default)]
    pub signal: SignalSpec,
    pub omega: OmegaSpec,
    /// Tuning for HCT's `Ω̂`; oracle tuning with the true row count when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimation: Option<EstimationConfig>,
}

impl PointConfig {
    pub fn literal(p: usize, n: usize, eps: f64, tau: f64, omega: OmegaSpec) -> Self {
        Self {
            coords: Vec::new(),
            p,
            n: Some(n),
            eps: Some(eps),
            tau: Some(tau),
            theta: None,
            beta: None,
            r: None,
            signal: SignalSpec::default(),
            omega,
            estimation: None,
        }
    }

    pub fn exponents(p: usize, theta: f64, beta: f64, r: f64, omega: OmegaSpec) -> Self {
        Self {
            coords: Vec::new(),
            p,
            n: None,
            eps: None,
            tau: None,
            theta: Some(theta),
            beta: Some(beta),
            r: Some(r),
            signal: SignalSpec::default(),
            omega,
            estimation: None,
        }
    }

    pub fn with_coords(mut self, coords: &[(&str, f64)]) -> Self {
        self.coords = coords.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        self
    }

    pub fn params(&self) -> Result<RareWeakParams> {
        match (self.n, self.eps, self.tau, self.theta, self.beta, self.r) {
            (Some(n), Some(eps), Some(tau), None, None, None) => RareWeakParams::from_literals(self.p, n, eps, tau),
            (None, None, None, Some(theta), Some(beta), Some(r)) => {
                RareWeakParams::from_exponents(self.p, beta, r, theta)
            }
            _ => Err(HctError::Config(
                "a point needs exactly one of (n, eps, tau) or (theta, beta, r)".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub seed: u64,
    pub reps: usize,
    /// Number of test samples `m` per repetition.
    pub test_size: usize,
    pub methods: Vec<Method>,
    pub cv: CvConfig,
    /// `Ω̂` handed to CVT: the true matrix or HCT's estimate.
    pub cv_omega: OmegaSource,
    pub memory_cap_bytes: u64,
    /// Coordinate used as the x-axis of plot output.
    pub plot_x: String,
    pub points: Vec<PointConfig>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(HctError::Config("reps must be at least 1".into()));
        }
        if self.test_size == 0 {
            return Err(HctError::Config("test_size must be at least 1".into()));
        }
        if self.cv_omega == OmegaSource::Diagonal {
            return Err(HctError::Config("cv_omega must be `true` or `estimated`".into()));
        }
        for pt in &self.points {
            pt.params()?;
            pt.signal.validate()?;
            if let Some(e) = &pt.estimation {
                e.validate()?;
            }
        }
        Ok(())
    }

    /// Applies every field set in `o`.
    pub fn apply(&mut self, o: &ExperimentOverrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.reps {
            self.reps = v;
        }
        if let Some(v) = o.test_size {
            self.test_size = v;
        }
        if let Some(v) = &o.methods {
            self.methods = v.clone();
        }
        if let Some(v) = &o.cv {
            self.cv = v.clone();
        }
        if let Some(v) = o.cv_omega {
            self.cv_omega = v;
        }
        if let Some(v) = o.memory_cap_bytes {
            self.memory_cap_bytes = v;
        }
        if let Some(v) = &o.plot_x {
            self.plot_x = v.clone();
        }
        if let Some(v) = &o.points {
            self.points = v.clone();
        }
    }
}

/// Partial configuration, as read from a TOML file or built from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentOverrides {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub test_size: Option<usize>,
    pub methods: Option<Vec<Method>>,
    pub cv: Option<CvConfig>,
    pub cv_omega: Option<OmegaSource>,
    pub memory_cap_bytes: Option<u64>,
    pub plot_x: Option<String>,
    pub points: Option<Vec<PointConfig>>,
}

impl ExperimentOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HctError::Config(e.to_string()))
    }
}

/// Starts from `preset` (or the file's preset, or `custom`), applies the
/// flags and then the file, so the file wins.
pub fn resolve_config(
    preset: Option<Preset>,
    flags: &ExperimentOverrides,
    file: Option<&ExperimentOverrides>,
) -> Result<ExperimentConfig> {
    let base = file
        .and_then(|f| f.preset)
        .or(flags.preset)
        .or(preset)
        .unwrap_or(Preset::Custom);
    let mut cfg = presets::preset(base)?;
    cfg.apply(flags);
    if let Some(f) = file {
        cfg.apply(f);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Default HCT tuning: oracle `η` and `k` = the true row count.
pub(crate) fn default_estimation(k: usize) -> EstimationConfig {
    EstimationConfig::oracle(k)
}

pub(crate) fn fixed_estimation(eta: f64, zeta: f64) -> EstimationConfig {
    EstimationConfig {
        eta: crate::precision_est::EtaMode::Fixed { eta },
        zeta: ZetaMode::Fixed(zeta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("LDA".parse::<Method>().is_err());
    }

    #[test]
    fn point_needs_one_parameterisation() {
        let pt = PointConfig::literal(100, 10, 0.1, 2.0, OmegaSpec::Identity);
        assert_eq!(pt.params().unwrap().n, 10);
        let mut bad = pt.clone();
        bad.beta = Some(0.5);
        assert!(bad.params().is_err());
        let ex = PointConfig::exponents(10_000, 0.4, 0.5, 0.3, OmegaSpec::Identity);
        assert_eq!(ex.params().unwrap().n, 40);
    }

    #[test]
    fn file_overrides_flags_override_preset() {
        let flags = ExperimentOverrides {
            seed: Some(5),
            reps: Some(3),
            ..Default::default()
        };
        let file = ExperimentOverrides::from_toml("reps = 2\n").unwrap();
        let cfg = resolve_config(Some(Preset::Exp2a), &flags, Some(&file)).unwrap();
        assert_eq!(cfg.preset, Preset::Exp2a);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.reps, 2);
    }

    #[test]
    fn unknown_toml_key_is_rejected() {
        assert!(ExperimentOverrides::from_toml("repz = 2\n").is_err());
    }
}
