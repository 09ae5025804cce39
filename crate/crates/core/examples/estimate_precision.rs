//! Estimates a tridiagonal precision matrix and compares it with the truth.
use sparse_hct::graph::sparsity_degree;
use sparse_hct::model::{build_omega, sample_dataset, sample_mu, LabelScheme, NoiseSampler, OmegaSpec, RareWeakParams, SignalSpec};
use sparse_hct::precision_est::{estimate_precision, EstimationConfig};
use sparse_hct::rng::substream;

fn main() -> sparse_hct::Result<()> {
    let params = RareWeakParams::from_literals(300, 400, 0.05, 3.0)?;
    let omega = build_omega(&OmegaSpec::Tridiagonal { a: 0.35 }, params.p)?;
    let mut rng = substream(11, 0);
    let draw = sample_mu(&params, &SignalSpec::default(), &mut rng)?;
    let train = sample_dataset(&draw.mu, &NoiseSampler::new(&omega)?, params.n, LabelScheme::Balanced, &mut rng)?;

    let cfg = EstimationConfig::oracle(sparsity_degree(&omega));
    let est = estimate_precision(&train, &cfg, Some(&omega))?;
    let mut max_err = 0.0f64;
    for i in 0..params.p {
        for j in i.saturating_sub(1)..(i + 2).min(params.p) {
            max_err = max_err.max((est.omega.get(i, j) - omega.get(i, j)).abs());
        }
    }
    println!("eta = {}, ridge = {}, nonzeros = {}", est.eta, est.ridge, est.omega.nnz());
    println!("max error on the band: {max_err:.3}");
    Ok(())
}
