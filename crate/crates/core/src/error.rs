use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("label at index {index} is {value}, expected 0 or 1")]
    InvalidLabel { index: usize, value: f64 },

    #[error("binary prediction at index {index} is {value}, expected 0 or 1")]
    InvalidBinary { index: usize, value: f64 },

    #[error("probability at index {index} is {value}, expected a value in [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("score at index {index} is not finite")]
    NonFiniteScore { index: usize },

    #[error("length mismatch: {labels} labels vs {other} values")]
    LengthMismatch { labels: usize, other: usize },

    #[error("decay rate {0} is outside (0, 1]")]
    DecayRate(f64),

    #[error("invalid decay table: {0}")]
    DecayTable(String),

    #[error("K = {0} is outside [0, 100]")]
    KOutOfRange(f64),

    #[error("beta = {0} must be positive and finite")]
    Beta(f64),

    #[error("threshold {0} is not finite")]
    NonFiniteThreshold(f64),

    #[error("the {protocol} protocol needs binary predictions")]
    BinaryRequired { protocol: &'static str },

    #[error("expected {expected} predictions")]
    WrongPredictionMode { expected: &'static str },

    #[error("no threshold candidates to evaluate")]
    EmptyCandidates,

    #[error("a quantile grid needs at least 2 points, got {0}")]
    QuantileGrid(usize),

    #[error("enumeration over {0} points exceeds the bound of {max}", max = crate::oracle::ENUMERATION_LIMIT)]
    EnumerationBound(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the filesystem rather than of the inputs' content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
