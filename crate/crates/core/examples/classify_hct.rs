//! Fits HCT with the true and an estimated precision matrix and reports test error.
use sparse_hct::classifier::{evaluate, fit_hct, OmegaSource};
use sparse_hct::graph::sparsity_degree;
use sparse_hct::hct::{ThresholdBounds, TransformMode};
use sparse_hct::model::{build_omega, sample_dataset, sample_mu, LabelScheme, NoiseSampler, OmegaSpec, RareWeakParams, SignalSpec};
use sparse_hct::precision_est::{estimate_precision, EstimationConfig};
use sparse_hct::rng::substream;

fn main() -> sparse_hct::Result<()> {
    let params = RareWeakParams::from_literals(1000, 300, 0.05, 3.0)?;
    let omega = build_omega(&OmegaSpec::Tridiagonal { a: 0.4 }, params.p)?;
    let sampler = NoiseSampler::new(&omega)?;
    let mut rng = substream(5, 0);
    let draw = sample_mu(&params, &SignalSpec::default(), &mut rng)?;
    let train = sample_dataset(&draw.mu, &sampler, params.n, LabelScheme::Balanced, &mut rng)?;
    let test = sample_dataset(&draw.mu, &sampler, 1000, LabelScheme::Random, &mut rng)?;
    let bounds = ThresholdBounds::from(&params);

    let (known, rep) = fit_hct(&train, &omega, OmegaSource::True, bounds, TransformMode::It)?;
    println!("true Omega:      t = {:.3}, selected = {}, error = {:.3}", rep.clamped_threshold, known.num_selected, evaluate(&known, &test)?);

    let est = estimate_precision(&train, &EstimationConfig::oracle(sparsity_degree(&omega)), Some(&omega))?;
    let (fitted, rep) = fit_hct(&train, &est.omega, OmegaSource::Estimated, bounds, TransformMode::It)?;
    println!("estimated Omega: t = {:.3}, selected = {}, error = {:.3}", rep.clamped_threshold, fitted.num_selected, evaluate(&fitted, &test)?);
    Ok(())
}
