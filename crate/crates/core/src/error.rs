use thiserror::Error;

/// Errors raised by the watermarking toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("pgm: bad magic number (expected P5)")]
    BadMagic,
    #[error("pgm: malformed header: {0}")]
    BadHeader(String),
    #[error("pgm: unsupported maxval {0} (expected 255)")]
    UnsupportedMaxval(u32),
    #[error("pgm: image is not square ({width}x{height})")]
    NotSquare { width: usize, height: usize },
    #[error("image side {0} is not a power of two")]
    SideNotPowerOfTwo(usize),
    #[error("pgm: truncated payload (expected {expected} bytes, got {actual})")]
    Truncated { expected: usize, actual: usize },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("circuit error: {0}")]
    Circuit(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-parsable category, used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::BadMagic
            | Error::BadHeader(_)
            | Error::UnsupportedMaxval(_)
            | Error::NotSquare { .. }
            | Error::SideNotPowerOfTwo(_)
            | Error::Truncated { .. } => "bad-image",
            Error::Structural(_) => "structural",
            Error::UnsupportedScale(_) => "unsupported-scale",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidKey(_) => "invalid-key",
            Error::Circuit(_) => "circuit",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
