use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by data ingestion, sampling and summarization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header in {path}: expected `subject,measurement,time,value`, found `{found}`")]
    MalformedHeader { path: PathBuf, found: String },

    #[error("malformed row {line} in {path}: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("missing cell (subject {subject}, measurement {measurement}, time {time}) in {path}")]
    MissingCell {
        path: PathBuf,
        subject: usize,
        measurement: usize,
        time: usize,
    },

    #[error("duplicate cell (subject {subject}, measurement {measurement}, time {time}) at row {line} in {path}")]
    DuplicateCell {
        path: PathBuf,
        subject: usize,
        measurement: usize,
        time: usize,
        line: usize,
    },

    #[error("non-finite value `{value}` at row {line} in {path}")]
    NonFiniteValue {
        path: PathBuf,
        line: usize,
        value: String,
    },

    #[error("cannot serialize an empty chain")]
    EmptyChain,

    #[error("all categorical weights vanished ({context})")]
    DegenerateWeights { context: String },

    #[error("partition length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no posterior draws supplied")]
    EmptyDraws,

    #[error("estimated profile {profile} has no subjects assigned")]
    EmptyProfile { profile: usize },

    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("incompatible chains: {context}")]
    IncompatibleChains { context: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("sampler failed at iteration {iteration}: {source}")]
    Sampler {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-parsable code, one per error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedHeader { .. } => "E_HEADER",
            Error::MalformedRow { .. } => "E_ROW",
            Error::MissingCell { .. } => "E_MISSING_CELL",
            Error::DuplicateCell { .. } => "E_DUPLICATE_CELL",
            Error::NonFiniteValue { .. } => "E_NONFINITE",
            Error::EmptyChain => "E_EMPTY_CHAIN",
            Error::DegenerateWeights { .. } => "E_DEGENERATE_WEIGHTS",
            Error::LengthMismatch { .. } => "E_LENGTH_MISMATCH",
            Error::EmptyDraws => "E_EMPTY_DRAWS",
            Error::EmptyProfile { .. } => "E_EMPTY_PROFILE",
            Error::ShapeMismatch { .. } => "E_SHAPE_MISMATCH",
            Error::IncompatibleChains { .. } => "E_INCOMPATIBLE_CHAINS",
            Error::InvalidConfig(_) => "E_CONFIG",
            Error::Io { .. } => "E_IO",
            Error::Sampler { .. } => "E_SAMPLER",
            Error::Serde(_) => "E_SERDE",
        }
    }

    /// Process exit code: 2 for data errors, 3 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MalformedHeader { .. }
            | Error::MalformedRow { .. }
            | Error::MissingCell { .. }
            | Error::DuplicateCell { .. }
            | Error::NonFiniteValue { .. }
            | Error::ShapeMismatch { .. }
            | Error::IncompatibleChains { .. }
            | Error::InvalidConfig(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
