//! Spatial-qudit state engineering and tomography toolkit.

// Validation guards spell `!(x > 0.0)` on purpose: unlike `x <= 0.0`, the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod fixtures;
mod linalg;
pub mod measurement;
pub mod mub;
pub mod operator;
pub mod optics;
pub mod random;
pub mod seed;
pub mod state;
pub mod tomography;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Result alias for fallible library operations.
pub type Result<T> = std::result::Result<T, Error>;
