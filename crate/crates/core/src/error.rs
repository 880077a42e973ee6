use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported channel: {0}")]
    UnsupportedChannel(String),
    #[error("quadrature did not converge for {what} (error estimate {estimate:e})")]
    Quadrature { what: String, estimate: f64 },
    #[error("numeric consistency violated: {0}")]
    NumericConsistency(String),
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
