//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A dense representation would exceed the configured capacity.
    #[error("capacity exceeded: {what} needs dimension {dim}, dense limit is {limit}")]
    Capacity {
        what: &'static str,
        dim: usize,
        limit: usize,
    },
    /// Mismatched or malformed dimensions.
    #[error("shape error: {0}")]
    Shape(String),
    /// An input failed a numerical validity check.
    #[error("validation error: {0}")]
    Validation(String),
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = core::result::Result<T, Error>;
