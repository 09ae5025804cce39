//! Rare/weak calibration, structured precision matrices and seeded simulation.

mod omega;
mod params;
mod sampling;
mod signal;

pub use omega::{build_omega, OmegaSpec};
pub use params::{derive_params, s_star, s_tilde, RareWeakParams};
pub use sampling::{sample_dataset, z_vector, Dataset, LabelScheme, NoiseSampler, ZVector};
pub use signal::{sample_mu, SignPolicy, SignalDistribution, SignalDraw, SignalSpec};
