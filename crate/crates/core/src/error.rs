use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("evaluation produced a non-finite value at x = {0}")]
    Evaluation(f64),
    #[error("no closed form for {0}; use the projection oracle")]
    Capability(String),
    #[error("did not converge: {0}")]
    Convergence(String),
    #[error("degenerate fit: {0}")]
    Fit(String),
    #[error("unsupported regime: {0}")]
    Regime(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
