use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("relation `{0}` is not registered")]
    RelationNotRegistered(String),

    #[error("relation `{id}` is registered as `{registered}`, not `{given}`")]
    RelationLabelMismatch {
        id: String,
        registered: String,
        given: String,
    },

    #[error("graphs were built against different relation registries")]
    RegistryMismatch,

    #[error("node `{0}` not found")]
    NodeNotFound(String),

    #[error("edge endpoint `{0}` is not a known node (strict endpoint mode)")]
    UnknownEndpoint(String),

    #[error("duplicate node `{0}`")]
    DuplicateNode(String),

    #[error("invalid node `{id}`: {reason}")]
    InvalidNode { id: String, reason: String },

    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),

    #[error("edge must carry at least one evidence record")]
    EmptyEvidence,

    #[error("percent change undefined for `{0}`: baseline is zero")]
    UndefinedChange(&'static str),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: {source}")]
    AtLine {
        path: PathBuf,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_line(self, path: impl Into<PathBuf>, line: usize) -> Self {
        match self {
            e @ (Error::Parse { .. } | Error::AtLine { .. } | Error::Io { .. }) => e,
            other => Error::AtLine {
                path: path.into(),
                line,
                source: Box::new(other),
            },
        }
    }

    /// The innermost error, with any file/line wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            other => other,
        }
    }
}
