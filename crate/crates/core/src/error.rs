use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A sample of the integrand (or an expression) was non-finite or undefined.
    #[error("evaluation error at t = {t}: {reason}")]
    Evaluation { t: f64, reason: String },

    #[error("divergence: {0}")]
    Divergence(String),

    /// The caller-supplied antiderivative does not match the integral of its
    /// stated integrand.
    #[error(
        "hypothesis violated at x = {x}: |G(x) - G(a) - integral| = {deviation:e} exceeds {tol:e}"
    )]
    HypothesisViolation { x: f64, deviation: f64, tol: f64 },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn eval(t: f64, reason: impl Into<String>) -> Self {
        Error::Evaluation {
            t,
            reason: reason.into(),
        }
    }
}
