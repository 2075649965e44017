use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed polynomial {poly:#o}: {reason}")]
    MalformedPolynomial { poly: u32, reason: &'static str },
    #[error("invalid state {0}, must be below 16")]
    InvalidState(u8),
    #[error("input length {0} is odd; duo-binary sections consume bit pairs")]
    OddLength(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("probability {0} outside its valid range")]
    ProbabilityOutOfRange(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("block parities already agree; nothing to bisect")]
    ParityAlreadyMatches,
    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),
    #[error("invalid input data: {0}")]
    InvalidData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
