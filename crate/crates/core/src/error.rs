use thiserror::Error;

use crate::data::LoadError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Load(#[from] LoadError),

    #[error("unknown condition `{0}`")]
    UnknownCondition(String),

    #[error("user `{user}` has no votes for condition `{condition}`")]
    NoVotes { condition: String, user: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {need} {what}, got {got}")]
    TooFew {
        what: &'static str,
        need: usize,
        got: usize,
    },

    /// The requested quantity is mathematically undefined for this input
    /// (for example a correlation against a constant vector).
    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by a bad configuration rather than bad input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
