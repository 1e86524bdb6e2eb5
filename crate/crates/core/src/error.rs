use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid Cartan datum: {0}")]
    InvalidDatum(String),
    #[error("element is not weight-homogeneous")]
    MixedWeight,
    #[error("the zero element has no level window")]
    EmptyElement,
    #[error("resource budget exceeded: {0}")]
    ResourceExceeded(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown node index {0}")]
    UnknownNode(usize),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("cache file mismatch: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
