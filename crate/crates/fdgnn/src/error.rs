//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    /// A required dataset file is absent.
    #[error("missing dataset file: {0}")]
    MissingFile(PathBuf),

    /// Dataset files are present but internally inconsistent.
    #[error("malformed dataset: {0}")]
    MalformedDataset(String),

    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Power iteration ran out of its iteration budget.
    ///
    /// `last_estimate` is the most recent spectral-radius iterate; callers
    /// may fall back to a dense eigen-solve for moderate dimensions.
    #[error(
        "spectral radius estimate did not converge within {iterations} iterations \
         (last estimate {last_estimate:.6e})"
    )]
    SpectralNoConvergence { iterations: usize, last_estimate: f64 },

    /// Recurrent weight sampling kept producing a zero spectral radius.
    #[error("sampled recurrent matrix had zero spectral radius in {0} attempts")]
    DegenerateSample(usize),

    /// Matrix shapes do not line up for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A computation produced NaN or infinity.
    #[error("non-finite values encountered in {0}")]
    NonFinite(String),

    /// The readout normal equations are singular at lambda = 0.
    #[error("singular readout system at lambda = 0; use lambda > 0")]
    SingularSystem,

    /// A class is too small to be spread over the requested folds.
    #[error("class {class} has only {count} members, fewer than {folds} folds")]
    Stratification { class: usize, count: usize, folds: usize },

    /// A persisted model was written by an unsupported format version.
    #[error("model format version {found} unsupported (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    /// A persisted model could not be decoded.
    #[error("model file corrupt: {0}")]
    ModelCorrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
