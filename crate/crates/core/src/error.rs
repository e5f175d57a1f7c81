use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two divided-difference nodes are closer than the distinctness tolerance.
    #[error("coefficients {0} and {1} are coincident")]
    CoincidentCoefficients(f64, f64),

    /// The alternating partial-fraction sum lost too many digits to cancellation.
    #[error("precision loss: condition estimate {condition:.3e} exceeds bound {bound:.3e}")]
    PrecisionLoss { condition: f64, bound: f64 },

    #[error("series failed to converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("infeasible placement policy: {0}")]
    Infeasible(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
