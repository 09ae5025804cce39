pub mod classifier;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod hct;
pub mod linalg;
pub mod matrix;
pub mod model;
pub mod normal;
pub mod precision_est;
pub mod rng;
pub mod theory;

pub use error::{HctError, Result};
pub use matrix::SparseSymMatrix;
