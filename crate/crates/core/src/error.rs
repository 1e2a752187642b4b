use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("matrix is not positive-definite: {0}")]
    NotPositiveDefinite(String),

    /// A dual or real operation was evaluated outside its domain.
    #[error("numeric domain error in `{op}` at value {value:e}")]
    NumericDomain { op: &'static str, value: f64 },

    #[error("singular geometry: {0}")]
    Singularity(&'static str),

    #[error("unsupported orbit: {0}")]
    UnsupportedOrbit(String),

    /// The CLF velocity gradient vanished, so the steering law is undefined.
    #[error("degenerate CLF gradient (norm {norm:e})")]
    DegenerateGradient { norm: f64 },

    #[error("propagation failed at t = {t} TU: {reason}")]
    Propagation { t: f64, reason: String, state: [f64; 7] },

    #[error("unknown case `{0}`")]
    UnknownCase(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error on {}: {message}", path.display())]
    Serialization { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn ser(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Serialization {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
