use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("model is unstable: branching ratio {ratio} is not below 1")]
    Unstable { ratio: f64 },

    #[error("invalid event sequence: {0}")]
    InvalidSequence(String),

    #[error("fast path `{requested}` is not available for the `{family}` kernel")]
    UnsupportedFastPath {
        requested: &'static str,
        family: &'static str,
    },

    #[error("thinning needs a nonincreasing hazard or a user-supplied bound ({family} kernel)")]
    UnsupportedBound { family: &'static str },

    #[error("thinning bound violated at t = {time}: intensity {intensity} > bound {bound}")]
    BoundViolated {
        time: f64,
        intensity: f64,
        bound: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
