use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum HctError {
    #[error("parameter `{name}` = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: String,
    },

    #[error("matrix is not positive definite: pivot {pivot:e} at row {row}")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("cannot build precision matrix {spec}: {source}")]
    OmegaConstruction {
        spec: String,
        #[source]
        source: Box<HctError>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("refit failed for row {row}: {reason}")]
    Refit { row: usize, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("refusing to allocate {needed} bytes for dense covariance (cap is {cap} bytes)")]
    MemoryCap { needed: u64, cap: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HctError>;

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(HctError::Domain {
            name,
            value,
            domain: "(0, 1)".into(),
        })
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(HctError::Dimension { expected, got })
    }
}
