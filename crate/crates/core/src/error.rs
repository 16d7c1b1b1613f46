use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image error: {0}")]
    Image(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    /// Malformed JSON. `offset` is the byte offset of the failure in the input.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A well-formed document that breaks a contract rule.
    #[error("validation error: image_id {image_id:?}, {location}: {rule}")]
    Validation {
        image_id: String,
        location: String,
        rule: String,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("infeasible synthesis spec: {0}")]
    Spec(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Decode { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
