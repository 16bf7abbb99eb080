use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("multiplier `{0}` does not map real fields to real fields")]
    NotRealPreserving(String),

    #[error("field is not in X (even, mean zero, no cos x component)")]
    NotInX,

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("continuation failed on its first step at eps = {eps}")]
    ContinuationStart { eps: f64 },

    #[error("wave outside the monotone regime: u - v changes sign")]
    SignChange,

    #[error("no sign change of the root function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("frame fit failed to converge after {iterations} iterations (|F| = {residual:e})")]
    FrameFail { iterations: usize, residual: f64 },

    #[error("simulation blew up at t = {t}")]
    Blowup { t: f64 },

    #[error("CFL violated: dt = {dt} exceeds limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(arg: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        arg,
        reason: reason.into(),
    }
}
