use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("unsupported partition: {0}")]
    UnsupportedPartition(String),

    #[error("singularity: {0}")]
    Singular(String),

    #[error("unattainable density: {0}")]
    UnattainableDensity(String),

    #[error("degenerate ground state (gap {gap:.3e})")]
    Degenerate { gap: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    IterationLimit {
        iterations: usize,
        residual: f64,
        /// Residual after every accepted iteration.
        trace: Vec<f64>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("infinite potential: {0}")]
    InfinitePotential(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
