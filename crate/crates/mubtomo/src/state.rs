//! State vectors over the slit-mode Hilbert space.
//!
//! A dimension-`D` state assigns one complex amplitude to each of `D` slits.
//! Slits carry centered labels `l = i - (D-1)/2` for storage slot `i`: integer
//! labels for odd `D`, half-integer labels for even `D`. Labels drive the
//! physics (slit positions, phase ramps), slots drive the storage; the
//! convention tag keeps the two from drifting apart.

use crate::{C64, Error, Result};

/// Tolerance used when an operation demands a unit-norm vector.
pub const NORM_TOL: f64 = 1e-12;

/// How storage slots map to centered slit labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexConvention {
    /// Odd dimension: labels ..., -1, 0, 1, ...
    IntegerCentered,
    /// Even dimension: labels ..., -1/2, 1/2, ...
    HalfIntegerCentered,
}

impl IndexConvention {
    /// The convention forced by the dimension's parity.
    pub fn for_dim(dim: usize) -> Self {
        if dim % 2 == 1 {
            IndexConvention::IntegerCentered
        } else {
            IndexConvention::HalfIntegerCentered
        }
    }
}

/// Pure state of a `D`-slit qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditVector {
    amplitudes: Vec<C64>,
    convention: IndexConvention,
}

impl QuditVector {
    /// Wraps amplitudes as-is. Rejects empty input and non-unit norm.
    pub fn unit(amplitudes: Vec<C64>) -> Result<Self> {
        let v = Self::raw(amplitudes)?;
        let dev = (v.norm() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(v)
    }

    /// Scales amplitudes to unit norm. Rejects empty and all-zero input.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = Self::raw(amplitudes)?;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::invalid("amplitudes", "all amplitudes are zero"));
        }
        let scaled = v.amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(QuditVector {
            amplitudes: scaled,
            convention: v.convention,
        })
    }

    /// Real nonnegative amplitude list, normalized. Common for beam profiles.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis state occupying one slit slot.
    pub fn basis_state(dim: usize, slot: usize) -> Result<Self> {
        if slot >= dim {
            return Err(Error::IndexOutOfRange {
                what: "slit slot",
                index: slot as i64,
                dim,
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim.max(1)];
        amplitudes[slot] = C64::new(1.0, 0.0);
        Self::unit(amplitudes)
    }

    /// Crate-internal constructor for amplitudes produced by norm-preserving
    /// transforms; skips the unit-norm check.
    pub(crate) fn with_amplitudes(amplitudes: Vec<C64>) -> Self {
        Self::raw(amplitudes).expect("non-empty amplitude list")
    }

    fn raw(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("amplitudes", "empty amplitude list"));
        }
        let convention = IndexConvention::for_dim(amplitudes.len());
        Ok(QuditVector {
            amplitudes,
            convention,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    /// Centered label of storage slot `i`. Exact in floating point: integers
    /// and half-integers of this size are representable.
    pub fn label(&self, slot: usize) -> f64 {
        slot_label(self.dim(), slot)
    }

    /// All labels in slot order.
    pub fn labels(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.label(i)).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Deviation of the norm from one; zero for exactly normalized states.
    pub fn norm_deviation(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }

    pub(crate) fn check_unit(&self) -> Result<()> {
        let dev = self.norm_deviation();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(())
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &QuditVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared overlap `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &QuditVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// Centered label of slot `i` in a `dim`-slit array.
pub fn slot_label(dim: usize, slot: usize) -> f64 {
    slot as f64 - (dim as f64 - 1.0) / 2.0
}

/// Storage slot of a centered label, if the label belongs to the array.
pub fn label_slot(dim: usize, label: f64) -> Option<usize> {
    let slot = label + (dim as f64 - 1.0) / 2.0;
    if slot >= 0.0 && slot < dim as f64 && slot.fract() == 0.0 {
        Some(slot as usize)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn labels_center_on_zero_for_odd_dim() {
        let v = QuditVector::basis_state(7, 0).unwrap();
        assert_eq!(v.convention(), IndexConvention::IntegerCentered);
        assert_eq!(v.labels(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn labels_are_half_integers_for_even_dim() {
        let v = QuditVector::basis_state(8, 0).unwrap();
        assert_eq!(v.convention(), IndexConvention::HalfIntegerCentered);
        assert_eq!(
            v.labels(),
            vec![-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5]
        );
    }

    #[test]
    fn label_slot_round_trips() {
        for dim in [2, 3, 7, 8] {
            for slot in 0..dim {
                assert_eq!(label_slot(dim, slot_label(dim, slot)), Some(slot));
            }
            assert_eq!(label_slot(dim, dim as f64), None);
        }
    }

    #[test]
    fn unit_rejects_unnormalized() {
        let err = QuditVector::unit(vec![C64::new(0.9, 0.0), C64::new(0.0, 0.0)]);
        assert!(matches!(err, Err(Error::NotNormalized(_))));
    }

    #[test]
    fn normalized_scales_to_unit_norm() {
        let v = QuditVector::normalized(vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.amplitudes()[0].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(v.amplitudes()[1].im, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_slot() {
        let a = QuditVector::unit(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]).unwrap();
        let b = QuditVector::basis_state(2, 0).unwrap();
        let ip = a.inner(&b).unwrap();
        assert_abs_diff_eq!(ip.im, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.overlap_sq(&b).unwrap(), 1.0, epsilon = 1e-15);
    }
}
