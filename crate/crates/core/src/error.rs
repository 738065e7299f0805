use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },

    #[error("constructor `{ctor}` is not enabled in the fragment")]
    Fragment { ctor: &'static str },

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("invalid gameboard tree: {0}")]
    Tree(String),

    #[error("signature mismatch: {0}")]
    Mismatch(String),

    #[error("predicted size {predicted} exceeds cap {cap}")]
    CapExceeded { predicted: u128, cap: u128 },

    #[error("illegal move `{mv}`; legal moves: {}", legal.join(", "))]
    IllegalMove { mv: String, legal: Vec<String> },

    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
