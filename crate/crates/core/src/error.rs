use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is missing, unknown, or out of range.
    #[error("configuration error for `{key}`: {message}")]
    Config { key: String, message: String },

    /// An operation was called outside its documented domain.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate value scale: worst and best anchors are both {0}")]
    DegenerateScale(f64),

    #[error("degenerate t-test: both samples have zero variance")]
    DegenerateTest,

    /// A copy of a packet failed to reach its destination within the step budget.
    #[error("simulation fault{}: {message}", run.map(|r| format!(" in run {r}")).unwrap_or_default())]
    SimulationFault { run: Option<usize>, message: String },

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("failed to serialize {}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach the run index to a simulation fault.
    pub fn in_run(self, run: usize) -> Self {
        match self {
            Error::SimulationFault { message, .. } => Error::SimulationFault {
                run: Some(run),
                message,
            },
            other => other,
        }
    }
}
