use thiserror::Error;

/// Errors raised by the evaluators and the finite-part fitter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or quadrature did not reach its tolerance within the work limit.
    #[error("convergence failure in {what}: estimated error {err_est:e} after {work} steps")]
    ConvergenceFailure {
        what: &'static str,
        err_est: f64,
        work: usize,
    },
    /// The least-squares system behind a finite-part fit is too badly conditioned.
    #[error("ill-conditioned fit: condition estimate {condition:e}")]
    IllConditioned { condition: f64 },
    /// The fitted model does not describe the sampled data.
    #[error("fit rejected: residual rms {residual_rms:e} exceeds {threshold:e}")]
    FitRejected { residual_rms: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
