//! Draws a training set from the rare/weak model and prints its shape.
use sparse_hct::model::{build_omega, sample_dataset, sample_mu, z_vector, LabelScheme, NoiseSampler, OmegaSpec, RareWeakParams, SignalSpec};
use sparse_hct::rng::substream;

fn main() -> sparse_hct::Result<()> {
    let params = RareWeakParams::from_exponents(2000, 0.6, 0.4, 0.3)?;
    let omega = build_omega(&OmegaSpec::Tridiagonal { a: 0.3 }, params.p)?;
    let sampler = NoiseSampler::new(&omega)?;
    let mut rng = substream(7, 0);
    let draw = sample_mu(&params, &SignalSpec::default(), &mut rng)?;
    let train = sample_dataset(&draw.mu, &sampler, params.n, LabelScheme::Balanced, &mut rng)?;
    let z = z_vector(&train)?;

    println!("p = {}, n = {}, eps = {:.4}, tau = {:.4}", params.p, params.n, params.eps, params.tau);
    println!("{} signals out of {} expected", draw.support.len(), params.expected_signals());
    let on: f64 = draw.support.iter().map(|&j| z.z[j].abs()).sum::<f64>() / draw.support.len().max(1) as f64;
    println!("mean |z| on the support: {on:.3}");
    Ok(())
}
