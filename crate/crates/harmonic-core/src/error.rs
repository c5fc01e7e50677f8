use thiserror::Error;

/// Errors surfaced by the harmonic-process library.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid model parameters (s, N or reservoir densities).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The requested truncated state space is too large to materialize.
    #[error("state space too large: {states} states exceeds limit {limit}")]
    StateSpaceTooLarge { states: u128, limit: u128 },

    /// A quadrature did not reach the requested accuracy.
    #[error("quadrature failed to converge: estimated error {estimate:.3e} > tol {tol:.3e}")]
    QuadratureNonConvergence { estimate: f64, tol: f64 },

    /// An optimizer stopped before meeting its tolerance.
    #[error("optimizer did not converge: {0}")]
    OptimizerNonConvergence(String),

    /// A linear solve encountered a (numerically) singular matrix.
    #[error("singular linear system at pivot {0}")]
    SingularSystem(usize),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
