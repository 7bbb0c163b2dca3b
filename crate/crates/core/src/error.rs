//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum EditKitError {
    /// Incompatible tensor or vector dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Lookup of an unknown parameter or group.
    #[error("unknown {kind}: {name}")]
    Lookup { kind: &'static str, name: String },

    /// Invalid run or module configuration.
    #[error("invalid config: {0}")]
    Config(String),

    /// Invalid world specification.
    #[error("invalid world spec: {0}")]
    Spec(String),

    /// Operation called on a model in the wrong state (e.g. unfitted stats).
    #[error("invalid state: {0}")]
    State(String),

    /// Bad or empty input data.
    #[error("data error: {0}")]
    Data(String),

    /// Non-finite values where finite ones are required.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, EditKitError>;
