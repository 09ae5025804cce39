use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{evaluate, fit_cvt, fit_hct, ClassifierModel, OmegaSource};
use crate::error::{HctError, Result};
use crate::graph::sparsity_degree;
use crate::hct::{ThresholdBounds, TransformMode};
use crate::matrix::SparseSymMatrix;
use crate::model::{build_omega, sample_dataset, sample_mu, LabelScheme, NoiseSampler, RareWeakParams};
use crate::precision_est::{dense_bytes, diagonal_precision, estimate_precision, EstimationConfig};
use crate::rng::{derive_seed, substream};

use super::{default_estimation, ExperimentConfig, Method, PointConfig};

const CV_TAG: u64 = 0xC5;

/// Summary of one method at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub point: usize,
    pub coords: Vec<(String, f64)>,
    pub method: Method,
    pub reps: usize,
    pub mean_error: f64,
    /// Standard deviation of the per-repetition errors.
    pub sd_error: f64,
    /// Standard error of `mean_error`.
    pub se_error: f64,
    pub mean_threshold: f64,
    pub errors: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// Wall-clock seconds summed over repetitions. Not reproducible, so it
    /// only appears in JSON output.
    pub runtime_secs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub version: String,
    pub config: ExperimentConfig,
    pub coord_names: Vec<String>,
    pub rows: Vec<ResultRow>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ResultTable {
    /// The row for `method` whose coordinates include every `(name, value)`.
    pub fn find(&self, method: Method, coords: &[(&str, f64)]) -> Option<&ResultRow> {
        self.rows.iter().find(|r| {
            r.method == method
                && coords
                    .iter()
                    .all(|(k, v)| r.coords.iter().any(|(rk, rv)| rk == k && rv == v))
        })
    }

    pub fn coord(&self, row: &ResultRow, name: &str) -> Option<f64> {
        row.coords.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

struct Outcome {
    error: f64,
    threshold: f64,
    secs: f64,
}

struct PointContext<'a> {
    cfg: &'a ExperimentConfig,
    params: RareWeakParams,
    point: &'a PointConfig,
    omega: SparseSymMatrix,
    sampler: NoiseSampler,
    bounds: ThresholdBounds,
    estimation: Option<EstimationConfig>,
    seed: u64,
}

fn needs_estimate(cfg: &ExperimentConfig) -> bool {
    cfg.methods
        .iter()
        .any(|&m| m == Method::Hct || (m == Method::Cvt && cfg.cv_omega == OmegaSource::Estimated))
}

fn fit_method(
    ctx: &PointContext<'_>,
    method: Method,
    train: &crate::model::Dataset,
    estimate: Option<&SparseSymMatrix>,
    rep: usize,
) -> Result<ClassifierModel> {
    let b = ctx.bounds;
    let it = TransformMode::It;
    Ok(match method {
        Method::Hct => fit_hct(train, estimate.expect("estimate present"), OmegaSource::Estimated, b, it)?.0,
        Method::Phct => fit_hct(train, &ctx.omega, OmegaSource::True, b, it)?.0,
        Method::Ohct => fit_hct(train, &diagonal_precision(train)?, OmegaSource::Diagonal, b, TransformMode::Wt)?.0,
        Method::BtHct => fit_hct(train, &ctx.omega, OmegaSource::True, b, TransformMode::Bt)?.0,
        Method::WtHct => fit_hct(train, &ctx.omega, OmegaSource::True, b, TransformMode::Wt)?.0,
        Method::Cvt => {
            let mut rng = substream(derive_seed(ctx.seed, CV_TAG), rep as u64);
            let (om, src) = match ctx.cfg.cv_omega {
                OmegaSource::Estimated => (estimate.expect("estimate present"), OmegaSource::Estimated),
                _ => (&ctx.omega, OmegaSource::True),
            };
            fit_cvt(train, om, src, b, it, &ctx.cfg.cv, &mut rng)?
        }
    })
}

fn run_rep(ctx: &PointContext<'_>, rep: usize) -> Result<Vec<Outcome>> {
    let mut rng = substream(ctx.seed, rep as u64);
    let draw = sample_mu(&ctx.params, &ctx.point.signal, &mut rng)?;
    let train = sample_dataset(&draw.mu, &ctx.sampler, ctx.params.n, LabelScheme::Balanced, &mut rng)?;
    let test = sample_dataset(&draw.mu, &ctx.sampler, ctx.cfg.test_size, LabelScheme::Random, &mut rng)?;
    let start = Instant::now();
    let estimate = match &ctx.estimation {
        Some(e) => Some(estimate_precision(&train, e, Some(&ctx.omega))?.omega),
        None => None,
    };
    let est_secs = start.elapsed().as_secs_f64();
    ctx.cfg
        .methods
        .iter()
        .map(|&m| {
            let start = Instant::now();
            let model = fit_method(ctx, m, &train, estimate.as_ref(), rep)?;
            let error = evaluate(&model, &test)?;
            let mut secs = start.elapsed().as_secs_f64();
            if m == Method::Hct || (m == Method::Cvt && ctx.cfg.cv_omega == OmegaSource::Estimated) {
                secs += est_secs;
            }
            Ok(Outcome {
                error,
                threshold: model.threshold,
                secs,
            })
        })
        .collect()
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every point of `cfg` for `cfg.reps` repetitions. Repetitions run in
/// parallel on their own random streams and are merged in order, so the
/// table does not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let estimating = needs_estimate(cfg);
    let mut rows = Vec::new();
    for (idx, point) in cfg.points.iter().enumerate() {
        let params = point.params()?;
        // Σ̂, (Σ*)⁻¹ and one working copy are dense
        let needed = 3 * dense_bytes(params.p);
        if estimating && needed > cfg.memory_cap_bytes {
            return Err(HctError::MemoryCap {
                needed,
                cap: cfg.memory_cap_bytes,
            });
        }
        let omega = build_omega(&point.omega, params.p)?;
        let k = sparsity_degree(&omega);
        let ctx = PointContext {
            cfg,
            params,
            point,
            sampler: NoiseSampler::new(&omega)?,
            bounds: ThresholdBounds::from(&params),
            estimation: estimating.then(|| point.estimation.clone().unwrap_or_else(|| default_estimation(k))),
            omega,
            seed: derive_seed(cfg.seed, idx as u64),
        };
        let chunk = if estimating {
            ((cfg.memory_cap_bytes / needed) as usize).max(1)
        } else {
            cfg.reps
        };
        let mut outcomes: Vec<Vec<Outcome>> = Vec::with_capacity(cfg.reps);
        let mut start = 0;
        while start < cfg.reps {
            let end = (start + chunk).min(cfg.reps);
            let part: Vec<Vec<Outcome>> = (start..end)
                .into_par_iter()
                .map(|rep| run_rep(&ctx, rep))
                .collect::<Result<_>>()?;
            outcomes.extend(part);
            start = end;
        }
        for (mi, &method) in cfg.methods.iter().enumerate() {
            let errors: Vec<f64> = outcomes.iter().map(|o| o[mi].error).collect();
            let thresholds: Vec<f64> = outcomes.iter().map(|o| o[mi].threshold).collect();
            let (mean_error, sd_error) = mean_sd(&errors);
            rows.push(ResultRow {
                point: idx,
                coords: point.coords.clone(),
                method,
                reps: cfg.reps,
                mean_error,
                sd_error,
                se_error: sd_error / (cfg.reps as f64).sqrt(),
                mean_threshold: mean_sd(&thresholds).0,
                errors,
                thresholds,
                runtime_secs: outcomes.iter().map(|o| o[mi].secs).sum(),
                note: None,
            });
        }
    }
    Ok(ResultTable {
        version: env!("CARGO_PKG_VERSION").into(),
        coord_names: cfg
            .points
            .first()
            .map(|p| p.coords.iter().map(|c| c.0.clone()).collect())
            .unwrap_or_default(),
        config: cfg.clone(),
        rows,
        notes: Vec::new(),
    })
}
