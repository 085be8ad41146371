//! Error types shared across the simulator.

use thiserror::Error;

/// Errors produced by configuration validation, numeric kernels, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An operation received an argument outside its domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Matrix dimensions do not match what the operation requires.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix contained NaN or infinite entries.
    #[error("non-finite matrix entries")]
    NonFinite,

    /// Every eigenvalue of the channel is zero; no power allocation exists.
    #[error("unusable channel: all eigenvalues are zero")]
    UnusableChannel,

    /// Exhaustive subset enumeration was requested above the size cap.
    #[error("subset enumeration over {0} collaborators exceeds the cap of {1}")]
    EnumerationCap(usize, usize),

    /// The requested figure preset does not exist.
    #[error("unknown figure id: {0}")]
    UnknownFigure(String),

    /// A filesystem operation failed.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
