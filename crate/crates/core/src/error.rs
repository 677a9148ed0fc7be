use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {what} at {at}")]
    Pole { what: &'static str, at: Complex64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("quadrature budget exhausted after {evaluations} evaluations (error estimate {estimate:e})")]
    QuadratureBudget { evaluations: usize, estimate: f64 },

    #[error("non-finite integrand value at parameter {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("branch discontinuity near s = {at}: argument jump {jump} after maximal refinement")]
    BranchDiscontinuity { at: f64, jump: f64 },

    #[error("root solver failed: {0}")]
    RootSolver(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
