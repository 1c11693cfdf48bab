use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("alphabet or truncation mismatch: {0}")]
    Mismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("truncation degree {have} is too small; at least {need} is required")]
    DegreeTooSmall { have: usize, need: usize },
    #[error("infeasible linear system at degree {degree}: {detail}")]
    Infeasible { degree: usize, detail: String },
    #[error("check failed: {0}")]
    Check(String),
}

pub type Result<T> = std::result::Result<T, Error>;
