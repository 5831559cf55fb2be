use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { what: &'static str, iterations: usize, residual: f64 },

    #[error("no finite fixed point: tau = {tau} is not above tau_0(delta) = {tau_zero}")]
    NoFiniteFixedPoint { tau: f64, tau_zero: f64 },

    #[error("could not bracket a root for {0}")]
    BracketFailure(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
