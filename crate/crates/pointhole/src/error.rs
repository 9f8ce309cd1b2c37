//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid geometry (non-SPD matrix, open curve, origin on boundary, ...).
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// A numerical procedure failed (no bracket, factorization breakdown, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Invalid or inconsistent configuration. Collects every violated field.
    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
