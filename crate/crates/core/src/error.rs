use thiserror::Error;

/// Errors raised by the numeric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("quadrature did not reach rel_tol {rel_tol:e} after {refinements} refinements (last estimate {last:e})")]
    QuadratureNonConvergence {
        rel_tol: f64,
        refinements: usize,
        last: f64,
    },

    #[error("kernel tail needs more than {limit} terms for the requested accuracy")]
    TruncationBudget { limit: usize },

    #[error("no evaluation route for this case: {0}")]
    NoRoute(String),

    #[error("threshold search exceeded {0}")]
    ThresholdOverflow(u64),
}

pub type Result<T> = std::result::Result<T, NumericError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(NumericError::Domain(msg.into()))
}
