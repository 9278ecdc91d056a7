use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the integration toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed an argument outside the operation's domain.
    #[error("usage error: {0}")]
    Usage(String),

    /// A camera model or solver configuration is incomplete or invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input data violates a data invariant (sign convention, positivity, ...).
    #[error("data error: {0}")]
    Data(String),

    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    /// The solver cannot run on the given reconstruction domain.
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Failures while decoding or encoding raster files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: malformed header at byte {offset}: {reason}", path.display())]
    MalformedHeader {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error("{}: truncated payload at byte {offset}: expected {expected} bytes, found {found}", path.display())]
    Truncated {
        path: PathBuf,
        offset: u64,
        expected: u64,
        found: u64,
    },

    #[error("{}: dimension mismatch at byte {offset}: expected {expected_width}x{expected_height}, got {width}x{height}", path.display())]
    DimensionMismatch {
        path: PathBuf,
        offset: u64,
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("{}: {reason}", path.display())]
    Invalid { path: PathBuf, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dims(expected: (usize, usize), got: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected_width: expected.0,
            expected_height: expected.1,
            width: got.0,
            height: got.1,
        }
    }
}
