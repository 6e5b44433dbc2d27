use thiserror::Error;

/// Errors raised anywhere in the simulation and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mean-field evaluation over an empty ensemble")]
    EmptyEnsemble,

    #[error("non-finite state {value} for particle {particle} at step {step}")]
    NonFinite {
        particle: usize,
        step: usize,
        value: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("brownian increments were not recorded for this batch")]
    MissingIncrements,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("insufficient exceedances above the calibration threshold: found {found}, need {required}")]
    InsufficientExceedances { found: usize, required: usize },

    #[error(
        "picard iteration did not settle: generation {generation} terminal mean moved by {shift:.6} (allowed {allowed:.6})"
    )]
    NonConvergence {
        generation: usize,
        shift: f64,
        allowed: f64,
    },

    #[error("thresholds must be nonincreasing and inside the support")]
    InvalidThresholds,

    #[error("rank {k} out of range for {n} values")]
    RankOutOfRange { k: usize, n: usize },

    #[error("closed-form law cannot evaluate kernel of kind {0}")]
    UnsupportedClosedForm(&'static str),

    #[error("replication {replication}: {source}")]
    Replication {
        replication: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("malformed data file {path}: {reason}")]
    Data { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn in_replication(self, replication: u64) -> Self {
        Error::Replication {
            replication,
            source: Box::new(self),
        }
    }
}
