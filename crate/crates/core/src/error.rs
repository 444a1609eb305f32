use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants map one-to-one onto the CLI exit classes: configuration
/// and domain problems are caller mistakes, numerical failures are not.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("aliasing error: band {band} must be below N/2 = {half}")]
    Aliasing { band: usize, half: usize },

    #[error("shape error: expected {expected} components, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("range error: {message} (suggested t range [{t_min:e}, {t_max:e}])")]
    Range {
        message: String,
        t_min: f64,
        t_max: f64,
    },

    #[error("numerical error: {message} (best value {best:e}, residual {residual:e})")]
    Numerical {
        message: String,
        best: f64,
        residual: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Numerical { .. } | Error::Range { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
