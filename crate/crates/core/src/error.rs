use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vector of length {len} is not divisible into columns of length {leading_dim}")]
    NotDivisible { len: usize, leading_dim: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} is not unitary (max |A^H A - I| = {residual:.3e}, tolerance {tol:.1e})")]
    NonUnitaryInput { what: String, residual: f64, tol: f64 },

    #[error("block dimensions sum to {found} (sum of multiplicity x dimension), expected {expected}")]
    SpecDimensionError { expected: usize, found: usize },

    /// `family` is zero-based; the message counts from one.
    #[error(
        "block family {} (dimension {dim}): kernel has dimension {observed}, expected multiplicity {expected}",
        .family + 1
    )]
    KernelDimensionMismatch {
        family: usize,
        dim: usize,
        expected: usize,
        observed: usize,
    },

    #[error("verification failed: max residual {max_residual:.3e} exceeds threshold {threshold:.1e}")]
    VerificationFailed { max_residual: f64, threshold: f64 },

    #[error("unknown element label '{0}'")]
    UnknownLabel(String),

    #[error("invalid Cayley table: {0}")]
    InvalidCayleyTable(String),

    #[error("inconsistent character data: {0}")]
    InconsistentCharacters(String),

    #[error("cannot access {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {}: {message}", .path.display())]
    Parse { path: PathBuf, message: String },

    #[error("unknown example '{name}' (available: {})", .available.join(", "))]
    UnknownExample { name: String, available: Vec<&'static str> },
}
