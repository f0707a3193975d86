use std::path::PathBuf;

/// Execution errors. Anything here maps to exit code 2 at the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: not valid UTF-8")]
    Encoding { path: String },

    /// A JSON input failed schema validation. `location` is the JSON path of
    /// the first violation, e.g. `slides[0].reading_order`.
    #[error("{path}: {location}: {message}")]
    Schema {
        path: String,
        location: String,
        message: String,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("malformed {kind} {path}: {message}")]
    Malformed {
        kind: &'static str,
        path: String,
        message: String,
    },

    #[error("invalid timestamp {0:?}: expected ISO-8601 / RFC 3339")]
    Timestamp(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(
        kind: &'static str,
        path: impl Into<String>,
        message: impl std::fmt::Display,
    ) -> Self {
        Error::Malformed {
            kind,
            path: path.into(),
            message: message.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
