use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid channel, signaling or estimator configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A Monte Carlo or finite-difference evaluation produced a non-finite value.
    #[error("estimation failure at sample {index}: {reason}")]
    Estimation { index: u64, reason: String },

    /// A bit-energy minimization could not bracket a minimum.
    #[error("minimization failed: {0}")]
    Minimization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
