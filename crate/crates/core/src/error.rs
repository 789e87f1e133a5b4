use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample rate mismatch: {left} Hz vs {right} Hz")]
    RateMismatch { left: u32, right: u32 },

    #[error("waveform too short: {samples} samples, need at least {needed}")]
    TooShort { samples: usize, needed: usize },

    #[error("insufficient noise in {source_id}: {found} noise frames, need {needed}")]
    InsufficientNoise {
        source_id: String,
        found: usize,
        needed: usize,
    },

    #[error("missing estimate: {0}")]
    MissingEstimate(String),

    #[error("manifest format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("duplicate utterance id: {0}")]
    DuplicateId(String),

    #[error("mismatched pair: {0}")]
    MismatchedPair(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Wav { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn wav(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Wav {
            path: path.into(),
            message: message.into(),
        }
    }
}
