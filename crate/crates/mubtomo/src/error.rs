//! Error type shared by all library modules.

use thiserror::Error;

/// Failure modes of construction, simulation, and reconstruction routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Phase-basis construction requires an odd prime dimension.
    #[error("dimension {0} is not an odd prime")]
    NotOddPrime(usize),

    /// No basis-family construction exists for this dimension.
    #[error("no mutually unbiased basis construction available for dimension {0}")]
    UnsupportedDimension(usize),

    /// A basis, vector, or slit index fell outside its valid range.
    #[error("index {index} out of range ({what}, dimension {dim})")]
    IndexOutOfRange {
        what: &'static str,
        index: i64,
        dim: usize,
    },

    /// An operation required a unit-norm state vector.
    #[error("state vector is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A structured input (geometry, modulation, table, ...) violated its contract.
    #[error("invalid {what}: {why}")]
    InvalidInput { what: &'static str, why: String },

    /// Every slit transmission is zero, so no state can be prepared.
    #[error("all slit transmissions are zero")]
    ZeroTransmission,

    /// A sampling range was empty or degenerate.
    #[error("empty or degenerate sampling range")]
    EmptyRange,

    /// A count row summed to zero, so probabilities cannot be formed.
    #[error("basis row {row} has zero total counts")]
    EmptyCountRow { row: usize },

    /// Physicality correction clipped the entire spectrum.
    #[error("spectrum fully clipped; input was not a trace-one Hermitian estimate")]
    DegenerateSpectrum,
}

impl Error {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidInput {
            what,
            why: why.into(),
        }
    }
}
