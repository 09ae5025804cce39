//! Linear classifiers `sign(wᵀx)` with `w = Ω̂ μ̂` and a thresholded `μ̂`.

use std::fmt;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, HctError, Result};
use crate::hct::{clip_estimate, hc_threshold, Clamp, ThresholdBounds, ThresholdReport, TransformMode, TransformOperator};
use crate::linalg::dot;
use crate::matrix::SparseSymMatrix;
use crate::model::{z_vector, Dataset};
use crate::normal::PSI_BAR_INV_HALF;

/// Where the `Ω̂` used for transforming and weighting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSource {
    True,
    Estimated,
    /// Features treated as independent: `Ω̂` is diagonal.
    Diagonal,
}

impl fmt::Display for OmegaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OmegaSource::True => "true",
            OmegaSource::Estimated => "estimated",
            OmegaSource::Diagonal => "diagonal",
        })
    }
}

/// Cross-validation record: the candidate thresholds (descending) and their
/// mean held-out errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTrace {
    pub grid: Vec<f64>,
    pub mean_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub w: Vec<f64>,
    pub threshold: f64,
    pub mode: TransformMode,
    pub omega_source: OmegaSource,
    pub num_selected: usize,
    /// Set when `w = 0`, so every score is zero and every prediction is `+1`.
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<Clamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvTrace>,
}

impl ClassifierModel {
    fn from_mu_hat(mu_hat: &[f64], omega_hat: &SparseSymMatrix, threshold: f64, mode: TransformMode, omega_source: OmegaSource) -> Self {
        let w = omega_hat.matvec(mu_hat);
        Self {
            degenerate: w.iter().all(|&v| v == 0.0),
            num_selected: mu_hat.iter().filter(|&&m| m != 0.0).count(),
            w,
            threshold,
            mode,
            omega_source,
            clamp: None,
            cv: None,
        }
    }

    pub fn p(&self) -> usize {
        self.w.len()
    }

    pub fn to_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn from_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// Fits the HC-thresholded classifier with the given `Ω̂`. Pass the true `Ω`
/// for pHCT, an estimate for HCT, and the identity for oHCT.
pub fn fit_hct(
    data: &Dataset,
    omega_hat: &SparseSymMatrix,
    source: OmegaSource,
    bounds: ThresholdBounds,
    mode: TransformMode,
) -> Result<(ClassifierModel, ThresholdReport)> {
    check_dim(omega_hat.dim(), data.p())?;
    let z = z_vector(data)?;
    let z_hat = TransformOperator::new(omega_hat, mode)?.apply(&z.z)?;
    let report = hc_threshold(&z_hat, bounds)?;
    let mu_hat = clip_estimate(&z_hat, report.clamped_threshold);
    let mut model = ClassifierModel::from_mu_hat(&mu_hat, omega_hat, report.clamped_threshold, mode, source);
    model.clamp = Some(report.clamp);
    Ok((model, report))
}

/// Fits the classifier at a fixed threshold.
pub fn fit_at_threshold(
    data: &Dataset,
    omega_hat: &SparseSymMatrix,
    source: OmegaSource,
    mode: TransformMode,
    t: f64,
) -> Result<ClassifierModel> {
    check_dim(omega_hat.dim(), data.p())?;
    let z = z_vector(data)?;
    let z_hat = TransformOperator::new(omega_hat, mode)?.apply(&z.z)?;
    Ok(ClassifierModel::from_mu_hat(&clip_estimate(&z_hat, t), omega_hat, t, mode, source))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    /// Explicit candidate thresholds; when absent the grid is built from the
    /// data.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    /// Cap on the data-driven grid size.
    pub max_grid_points: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            grid: None,
            max_grid_points: 200,
        }
    }
}

/// Distinct `|Ẑ|` values in `(Ψ̄⁻¹(1/2), s*)`, descending, thinned to at most
/// `max_points` evenly spaced ranks. Falls back to `{s*}` when empty.
pub fn cv_grid(z_hat: &[f64], s_star: f64, max_points: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = z_hat
        .iter()
        .map(|z| z.abs())
        .filter(|&a| a > PSI_BAR_INV_HALF && a < s_star)
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals.dedup();
    if vals.is_empty() {
        return vec![s_star];
    }
    let m = max_points.max(1);
    if vals.len() <= m {
        return vals;
    }
    if m == 1 {
        return vec![vals[0]];
    }
    let last = vals.len() - 1;
    let mut out: Vec<f64> = (0..m).map(|k| vals[k * last / (m - 1)]).collect();
    out.dedup();
    out
}

/// Fold label for each sample: within each class, a shuffled round-robin.
fn stratified_folds<R: Rng + ?Sized>(labels: &[i8], folds: usize, rng: &mut R) -> Vec<usize> {
    let mut assign = vec![0; labels.len()];
    let mut offset = 0;
    for class in [1i8, -1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(rng);
        for (k, &i) in idx.iter().enumerate() {
            assign[i] = (offset + k) % folds;
        }
        offset += idx.len();
    }
    assign
}

/// Held-out error of `sign(μ̂(t)ᵀ Ω̂ x)` for every `t` in `grid` (descending).
fn fold_errors(z_hat_train: &[f64], held: &Dataset, omega_hat: &SparseSymMatrix, grid: &[f64]) -> Result<Vec<f64>> {
    let labels = held.require_labels()?;
    let mut order: Vec<usize> = (0..z_hat_train.len()).collect();
    order.sort_by(|&a, &b| z_hat_train[b].abs().total_cmp(&z_hat_train[a].abs()).then(a.cmp(&b)));
    let u: Vec<Vec<f64>> = held.rows().map(|x| omega_hat.matvec(x)).collect();
    let mut scores = vec![0.0; u.len()];
    let mut next = 0;
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid {
        while next < order.len() && z_hat_train[order[next]].abs() >= t {
            let j = order[next];
            let s = z_hat_train[j];
            if s != 0.0 {
                let sign = s.signum();
                for (sc, ui) in scores.iter_mut().zip(&u) {
                    *sc += sign * ui[j];
                }
            }
            next += 1;
        }
        let wrong = scores
            .iter()
            .zip(labels)
            .filter(|(&s, &y)| label_of(s) != y)
            .count();
        out.push(wrong as f64 / labels.len() as f64);
    }
    Ok(out)
}

/// Cross-validated threshold: per fold, fit on the remaining folds and score
/// the held-out fold at every grid value; choose the smallest mean error
/// (ties go to the larger threshold) and refit on all data.
pub fn fit_cvt<R: Rng + ?Sized>(
    data: &Dataset,
    omega_hat: &SparseSymMatrix,
    source: OmegaSource,
    bounds: ThresholdBounds,
    mode: TransformMode,
    config: &CvConfig,
    rng: &mut R,
) -> Result<ClassifierModel> {
    check_dim(omega_hat.dim(), data.p())?;
    let labels = data.require_labels()?;
    if config.folds < 2 {
        return Err(HctError::Config("cross validation needs at least two folds".into()));
    }
    if data.n() < config.folds {
        return Err(HctError::Degenerate(format!(
            "{} samples cannot fill {} folds",
            data.n(),
            config.folds
        )));
    }
    let op = TransformOperator::new(omega_hat, mode)?;
    let z_hat = op.apply(&z_vector(data)?.z)?;
    let mut grid = match &config.grid {
        Some(g) if !g.is_empty() => g.clone(),
        Some(_) => return Err(HctError::Config("empty threshold grid".into())),
        None => cv_grid(&z_hat, bounds.s_star, config.max_grid_points),
    };
    grid.sort_by(|a, b| b.total_cmp(a));

    let assign = stratified_folds(labels, config.folds, rng);
    let mut sums = vec![0.0; grid.len()];
    for f in 0..config.folds {
        let train: Vec<usize> = (0..data.n()).filter(|&i| assign[i] != f).collect();
        let held: Vec<usize> = (0..data.n()).filter(|&i| assign[i] == f).collect();
        let z_train = op.apply(&z_vector(&data.subset(&train))?.z)?;
        let errs = fold_errors(&z_train, &data.subset(&held), omega_hat, &grid)?;
        for (s, e) in sums.iter_mut().zip(errs) {
            *s += e;
        }
    }
    let mean_errors: Vec<f64> = sums.iter().map(|s| s / config.folds as f64).collect();
    // grid is descending, so the first minimiser is the largest threshold
    let mut best = 0;
    for k in 1..grid.len() {
        if mean_errors[k] < mean_errors[best] {
            best = k;
        }
    }
    let t = grid[best];
    let mut model = ClassifierModel::from_mu_hat(&clip_estimate(&z_hat, t), omega_hat, t, mode, source);
    model.cv = Some(CvTrace { grid, mean_errors });
    Ok(model)
}

fn label_of(score: f64) -> i8 {
    if score >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn score(model: &ClassifierModel, x: &[f64]) -> Result<f64> {
    check_dim(model.p(), x.len())?;
    Ok(dot(&model.w, x))
}

/// `sign(wᵀx)`, with a zero score mapped to `+1`.
pub fn predict(model: &ClassifierModel, x: &[f64]) -> Result<i8> {
    Ok(label_of(score(model, x)?))
}

/// Fraction of misclassified test samples.
pub fn evaluate(model: &ClassifierModel, test: &Dataset) -> Result<f64> {
    let labels = test.require_labels()?;
    if test.n() == 0 {
        return Err(HctError::Degenerate("empty test set".into()));
    }
    check_dim(model.p(), test.p())?;
    let wrong = test
        .rows()
        .zip(labels)
        .filter(|(x, &y)| label_of(dot(&model.w, x)) != y)
        .count();
    Ok(wrong as f64 / test.n() as f64)
}
