use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a documented precondition (bad parameters, unknown names).
    #[error("usage: {0}")]
    Usage(String),

    /// A computation could not run because too few samples were available.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Input data failed validation (malformed CSV, non-finite values, bad codes).
    #[error("data: {0}")]
    Data(String),

    /// A ground-truth spec failed validation.
    #[error("spec: {0}")]
    Spec(String),

    /// Simulation repeatedly produced diverging trajectories.
    #[error("unstable simulation: {0}")]
    Unstable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
