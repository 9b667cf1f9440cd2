use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Index arithmetic left the 64-bit range, or an input lies outside the
    /// grid/window it must fit in.
    #[error("range error: {0}")]
    Range(String),
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid operator combination: {0}")]
    Combo(String),
    #[error("golden table: {0}")]
    Golden(String),
}

pub(crate) fn overflow(what: &str) -> Error {
    Error::Range(format!("index overflow in {what}"))
}
