//! Transforms, p-values, the Higher Criticism curve and the clamped HC
//! threshold.

use std::fmt;
use std::io::Write;
use std::ops::Range;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, HctError, Result};
use crate::graph::induced_graph;
use crate::linalg::symmetric_sqrt;
use crate::matrix::SparseSymMatrix;
use crate::model::RareWeakParams;
use crate::normal::{two_sided_pvalue, PSI_BAR_INV_HALF};

/// Largest connected component for which the whitening transform builds a
/// dense square root.
pub const MAX_DENSE_SQRT: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformMode {
    /// Innovated thresholding: `Ẑ = Ω̂ Z`.
    It,
    /// Thresholding `Z` directly.
    Bt,
    /// Whitened thresholding: `Ẑ = Ω̂^{1/2} Z`.
    Wt,
}

impl fmt::Display for TransformMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformMode::It => "IT",
            TransformMode::Bt => "BT",
            TransformMode::Wt => "WT",
        })
    }
}

/// A prepared `Z ↦ Ẑ` map. For WT the square root is built once per
/// connected component of the graph of `Ω̂`.
#[derive(Debug, Clone)]
pub struct TransformOperator {
    mode: TransformMode,
    omega: Option<SparseSymMatrix>,
    blocks: Vec<(Vec<usize>, DMatrix<f64>)>,
    p: usize,
}

impl TransformOperator {
    pub fn new(omega: &SparseSymMatrix, mode: TransformMode) -> Result<Self> {
        let p = omega.dim();
        let mut op = Self {
            mode,
            omega: None,
            blocks: Vec::new(),
            p,
        };
        match mode {
            TransformMode::Bt => {}
            TransformMode::It => op.omega = Some(omega.clone()),
            TransformMode::Wt => {
                for comp in induced_graph(omega).components() {
                    if comp.len() == 1 {
                        let d = omega.diag()[comp[0]];
                        if !(d > 0.0) {
                            return Err(HctError::NotPositiveDefinite { row: comp[0], pivot: d });
                        }
                        op.blocks.push((comp, DMatrix::from_element(1, 1, d.sqrt())));
                        continue;
                    }
                    if comp.len() > MAX_DENSE_SQRT {
                        return Err(HctError::Usage(format!(
                            "whitening needs a dense square root of a {}-node block (limit {MAX_DENSE_SQRT})",
                            comp.len()
                        )));
                    }
                    let dense = DMatrix::from_fn(comp.len(), comp.len(), |r, c| omega.get(comp[r], comp[c]));
                    let root = symmetric_sqrt(dense)?;
                    op.blocks.push((comp, root));
                }
            }
        }
        Ok(op)
    }

    pub fn mode(&self) -> TransformMode {
        self.mode
    }

    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.p, z.len())?;
        Ok(match self.mode {
            TransformMode::Bt => z.to_vec(),
            TransformMode::It => self.omega.as_ref().expect("IT keeps Ω̂").matvec(z),
            TransformMode::Wt => {
                let mut out = vec![0.0; self.p];
                for (idx, root) in &self.blocks {
                    let local = nalgebra::DVector::from_iterator(idx.len(), idx.iter().map(|&i| z[i]));
                    let y = root * local;
                    for (k, &i) in idx.iter().enumerate() {
                        out[i] = y[k];
                    }
                }
                out
            }
        })
    }
}

pub fn transform(z: &[f64], omega_hat: &SparseSymMatrix, mode: TransformMode) -> Result<Vec<f64>> {
    TransformOperator::new(omega_hat, mode)?.apply(z)
}

/// Per-coordinate signal-to-noise of `Ẑ` when `Z ~ N(ν, Ω⁻¹)`: the mean of
/// `Ẑ(j)` divided by its standard deviation.
pub fn snr_profile(omega: &SparseSymMatrix, nu: &[f64], mode: TransformMode) -> Result<Vec<f64>> {
    let op = TransformOperator::new(omega, mode)?;
    let mean = op.apply(nu)?;
    let var: Vec<f64> = match mode {
        // Cov(Ω Z) = Ω Ω⁻¹ Ω = Ω
        TransformMode::It => omega.diag().to_vec(),
        TransformMode::Bt => omega.cholesky()?.inverse_diagonal(),
        // Cov(Ω^{1/2} Z) = I
        TransformMode::Wt => vec![1.0; omega.dim()],
    };
    Ok(mean.iter().zip(&var).map(|(m, v)| m / v.sqrt()).collect())
}

/// Two-sided p-values `π_j = P(|N(0,1)| ≥ |Ẑ(j)|)`.
pub fn pvalues(z_hat: &[f64]) -> Vec<f64> {
    z_hat.iter().map(|&z| two_sided_pvalue(z)).collect()
}

/// `HC_{p,j} = √p (j/p - π_(j)) / √((1 - j/p) j/p)` for `j = 1..p-1`, where
/// `π_(j)` are the p-values sorted ascending. Entry `k` holds `j = k + 1`.
pub fn hc_curve(pi: &[f64]) -> Vec<f64> {
    let mut sorted = pi.to_vec();
    sorted.sort_by(f64::total_cmp);
    hc_curve_sorted(&sorted)
}

fn hc_curve_sorted(sorted: &[f64]) -> Vec<f64> {
    let p = sorted.len();
    let pf = p as f64;
    let root_p = pf.sqrt();
    (1..p)
        .map(|j| {
            let u = j as f64 / pf;
            root_p * (u - sorted[j - 1]) / ((1.0 - u) * u).sqrt()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBounds {
    pub s_star: f64,
    pub s_tilde: f64,
}

impl From<&RareWeakParams> for ThresholdBounds {
    fn from(params: &RareWeakParams) -> Self {
        Self {
            s_star: params.s_star(),
            s_tilde: params.s_tilde(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clamp {
    None,
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `|Ẑ|` sorted descending; entry `k` is `|Ẑ|_(k+1)`.
    pub sorted_abs: Vec<f64>,
    /// `π_(j)`, ascending, aligned with `sorted_abs`.
    pub sorted_pvalues: Vec<f64>,
    /// `HC_{p,j}` for `j = 1..p-1`.
    pub hc_values: Vec<f64>,
    /// Indices `k` (so `j = k + 1`) searched by the argmax: those with
    /// `Ψ̄⁻¹(1/2) < |Ẑ|_(j) < s*`.
    pub admissible: Range<usize>,
    /// Maximising `j` (1-based), if any index was admissible.
    pub jhat: Option<usize>,
    pub raw_threshold: Option<f64>,
    pub clamped_threshold: f64,
    pub clamp: Clamp,
    /// Coordinates with `|Ẑ(j)| ≥ clamped_threshold`, ascending.
    pub selected: Vec<usize>,
}

impl ThresholdReport {
    pub fn max_hc(&self) -> Option<f64> {
        self.jhat.map(|j| self.hc_values[j - 1])
    }

    /// CSV with columns `j,abs_z,pvalue,hc`; `hc` is empty at `j = p`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["j", "abs_z", "pvalue", "hc"])?;
        for k in 0..self.sorted_abs.len() {
            let hc = self.hc_values.get(k).map_or(String::new(), |v| format!("{v:?}"));
            out.write_record([
                (k + 1).to_string(),
                format!("{:?}", self.sorted_abs[k]),
                format!("{:?}", self.sorted_pvalues[k]),
                hc,
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// HC threshold: maximise `HC_{p,j}` over admissible `j` (ties go to the
/// smaller `j`, i.e. the larger threshold), then clamp into `[s̃, s*]`. With
/// no admissible `j` the threshold is `s*`.
pub fn hc_threshold(z_hat: &[f64], bounds: ThresholdBounds) -> Result<ThresholdReport> {
    let p = z_hat.len();
    if p == 0 {
        return Err(HctError::Degenerate("empty vector".into()));
    }
    let mut sorted_abs: Vec<f64> = z_hat.iter().map(|z| z.abs()).collect();
    sorted_abs.sort_by(|a, b| b.total_cmp(a));
    let sorted_pvalues = pvalues(&sorted_abs);
    let hc_values = hc_curve_sorted(&sorted_pvalues);

    let lo = sorted_abs.partition_point(|&a| a >= bounds.s_star);
    let hi = sorted_abs.partition_point(|&a| a > PSI_BAR_INV_HALF);
    let admissible = lo.min(p - 1)..hi.min(p - 1).max(lo.min(p - 1));
    let mut jhat = None;
    let mut best = f64::NEG_INFINITY;
    for k in admissible.clone() {
        if hc_values[k] > best {
            best = hc_values[k];
            jhat = Some(k + 1);
        }
    }
    let raw_threshold = jhat.map(|j| sorted_abs[j - 1]);
    let (clamped_threshold, clamp) = match raw_threshold {
        None => (bounds.s_star, Clamp::Upper),
        Some(t) if t < bounds.s_tilde => (bounds.s_tilde, Clamp::Lower),
        Some(t) if t > bounds.s_star => (bounds.s_star, Clamp::Upper),
        Some(t) => (t, Clamp::None),
    };
    let selected = (0..p).filter(|&j| z_hat[j].abs() >= clamped_threshold).collect();
    Ok(ThresholdReport {
        sorted_abs,
        sorted_pvalues,
        hc_values,
        admissible,
        jhat,
        raw_threshold,
        clamped_threshold,
        clamp,
        selected,
    })
}

/// `μ̂(j) = sgn(Ẑ(j))·1{|Ẑ(j)| ≥ t}` with `sgn(0) = 0`.
pub fn clip_estimate(z_hat: &[f64], t: f64) -> Vec<f64> {
    z_hat
        .iter()
        .map(|&z| {
            if z.abs() >= t && z != 0.0 {
                z.signum()
            } else {
                0.0
            }
        })
        .collect()
}
