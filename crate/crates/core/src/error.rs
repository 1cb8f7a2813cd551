use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A window integral of the density is zero or not finite, so its log-mass is undefined.
    #[error("density integral over [{lo}, {hi}) is {value}; log-mass undefined")]
    NonIntegrableDensity { lo: f64, hi: f64, value: f64 },

    /// The density vanishes somewhere on a scanned window, so the Radon-Nikodym ratio is undefined.
    #[error("density vanishes on W + {shift}")]
    ZeroDensity { shift: i64 },

    #[error("index {index} outside tabulated range {lo}..={hi}")]
    OutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("weight index {index} outside tabulated range {lo}..={hi}")]
    WeightOutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("vector is zero")]
    ZeroVector,

    #[error("no witness found for k in 1..={k_max}")]
    NotFound { k_max: u32 },

    #[error("epsilon {epsilon} must lie in (0, {bound})")]
    EpsilonTooLarge { epsilon: f64, bound: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
