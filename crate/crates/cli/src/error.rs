use std::fmt;

use thiserror::Error;

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    /// The value is absent or the problem spans several values.
    Config,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(l) => write!(f, "line {l}"),
            Origin::Flag => write!(f, "command line"),
            Origin::Config => write!(f, "configuration"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error for '{key}' ({origin}): {message}")]
    Config {
        key: String,
        origin: Origin,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] cascade_core::Error),
}

impl CliError {
    pub(crate) fn config(key: impl Into<String>, origin: Origin, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            origin,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl fmt::Display, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
