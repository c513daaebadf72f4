use thiserror::Error;

/// Errors raised by the geometric constructions and the numerical drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpheraError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate point pair: x and y coincide")]
    DegeneratePair,
    #[error("inversion undefined for a point at the origin")]
    InversionUndefined,
    #[error("no real solution: target {nu} is below the minimum {minimum}")]
    NoSolution { nu: f64, minimum: f64 },
    #[error("quadrature did not converge (estimated error {abs_error:e} after {evals} evaluations)")]
    NonConvergence { abs_error: f64, evals: usize },
    #[error("level-curve corrector failed near ({xi}, {zeta})")]
    CorrectorFailure { xi: f64, zeta: f64 },
}

pub type Result<T> = std::result::Result<T, SpheraError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(SpheraError::Domain(msg.into()))
}
