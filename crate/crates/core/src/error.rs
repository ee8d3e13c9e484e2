use std::path::PathBuf;

use crate::mdp::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid MDP: {}", format_violations(.0))]
    InvalidMdp(Vec<Violation>),

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("variance operator has spectral radius >= 1; the variance is unbounded")]
    Divergent,

    #[error("cannot step from terminal state {0} of an episodic MDP without a restart")]
    TerminalStep(usize),

    #[error("trajectory enumeration needs more than {budget} paths")]
    PathBudget { budget: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed document {path}: {message}")]
    Document { path: PathBuf, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn document(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Document {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
