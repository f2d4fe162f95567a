use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value iteration did not reach tolerance {tol:e} within {max_iter} sweeps (residual {residual:e})")]
    NotConverged {
        tol: f64,
        max_iter: usize,
        residual: f64,
    },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit ({0}) exceeded")]
    IterationLimit(usize),

    #[error("Lyapunov function is zero outside the exception set at state {state}")]
    LyapunovZero { state: usize },

    #[error("Lyapunov contraction factor {beta} is not below 1")]
    LyapunovInvalid { beta: f64 },

    #[error("action {action} has no samples; sufficient sampling cannot hold")]
    UnsampledAction { action: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
