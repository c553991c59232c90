use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HtmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, HtmError>;
