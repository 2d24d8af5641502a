use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("metadata error in {path}: {message}")]
    Metadata { path: PathBuf, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite sample at {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error(
        "degenerate corner frequency: f_c = {f_c_bins} bins (< 2); pass --force-fc to override"
    )]
    DegenerateCorner { f_c_bins: f64 },

    #[error("filter bank break points {lower} and {upper} collapse (p = {value})")]
    CollapsedBreakPoints {
        lower: usize,
        upper: usize,
        value: f64,
    },

    #[error("scatterer {index} aliases: peak Doppler {doppler_hz:.1} Hz exceeds PRF/2 = {limit_hz:.1} Hz")]
    Aliasing {
        index: usize,
        doppler_hz: f64,
        limit_hz: f64,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn metadata(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Metadata {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit status: 2 for bad input or configuration, 1 for internal failures.
    pub fn exit_code(&self) -> i32 {
        use std::io::ErrorKind;
        match self {
            Error::Internal(_) => 1,
            Error::Io { source, .. } => match source.kind() {
                ErrorKind::NotFound
                | ErrorKind::PermissionDenied
                | ErrorKind::InvalidInput
                | ErrorKind::InvalidData
                | ErrorKind::UnexpectedEof => 2,
                _ => 1,
            },
            _ => 2,
        }
    }
}
