//! Prints boundary values and the ideal threshold next to its closed-form proxy.
use sparse_hct::model::{s_star, RareWeakParams};
use sparse_hct::theory::{ideal_threshold, regime_classify, rho, rho_star, t_star};

fn main() -> sparse_hct::Result<()> {
    for beta in [0.3, 0.5, 0.6, 0.8] {
        println!("rho({beta}) = {:.4}", rho(beta)?);
    }
    println!("rho*(0.45, theta = 0.25) = {:.4}", rho_star(0.45, 0.25)?);
    println!("(0.5, 0.3, theta = 0.4) is {:?}", regime_classify(0.5, 0.3, 0.4)?);

    let p = 1_000_000;
    for (beta, r) in [(0.6, 0.3), (0.6, 0.5), (0.3, 0.6)] {
        let params = RareWeakParams::from_exponents(p, beta, r, 0.3)?;
        let ideal = ideal_threshold(params.eps, params.tau, s_star(p));
        println!(
            "beta = {beta}, r = {r}: argmax = {:.4}, t* = {:.4}",
            ideal.t,
            t_star(beta, r, params.tau)?
        );
    }
    Ok(())
}
