use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("song `{song_id}`: stem `{instrument}` not found in {}", dir.display())]
    MissingStem {
        song_id: String,
        instrument: String,
        dir: PathBuf,
    },

    #[error("song `{song_id}`: stems are misaligned: {details}")]
    Alignment { song_id: String, details: String },

    #[error("{}: unsupported audio: {reason}", path.display())]
    UnsupportedAudio { path: PathBuf, reason: String },

    #[error("reference is silent in this window")]
    SilentReference,

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{}: {source}", path.display())]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
