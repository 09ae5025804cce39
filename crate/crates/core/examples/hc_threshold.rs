//! Computes the HC threshold of a vector of null draws with a few signals.
use rand_distr::{Distribution, StandardNormal};
use sparse_hct::hct::{hc_threshold, ThresholdBounds};
use sparse_hct::model::{s_star, s_tilde};
use sparse_hct::rng::substream;

fn main() -> sparse_hct::Result<()> {
    let p = 5000;
    let mut rng = substream(3, 0);
    let mut z: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
    for v in z.iter_mut().take(40) {
        *v += 3.5;
    }
    let bounds = ThresholdBounds { s_star: s_star(p), s_tilde: s_tilde(p, 30) };
    let rep = hc_threshold(&z, bounds)?;
    println!("j_hat = {:?}, max HC = {:?}", rep.jhat, rep.max_hc());
    println!("threshold = {:.4} ({:?}), selected = {}", rep.clamped_threshold, rep.clamp, rep.selected.len());
    let true_hits = rep.selected.iter().filter(|&&j| j < 40).count();
    println!("true signals among selected: {true_hits}");
    Ok(())
}
