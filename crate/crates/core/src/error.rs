use std::fmt;

use thiserror::Error;

/// Errors raised when an operation's input contract or a resource bound is violated.
///
/// Axiom failures are not errors: verifiers return a violation value describing the
/// failed axiom and a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    Input(String),
    #[error("{what} is {actual}, which exceeds the configured bound {limit}")]
    Bound {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn input(msg: impl fmt::Display) -> Self {
        Error::Input(msg.to_string())
    }

    pub(crate) fn parse(line: usize, column: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            column,
            message: msg.to_string(),
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Bound { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks `actual <= limit`, reporting `what` on failure.
pub(crate) fn check_bound(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::Bound { what, actual, limit })
    } else {
        Ok(())
    }
}
