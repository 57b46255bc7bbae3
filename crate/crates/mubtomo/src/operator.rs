//! Density operators on the slit-mode Hilbert space.

use crate::linalg;
use crate::state::QuditVector;
use crate::{C64, Error, Result};

/// Tolerated Hermiticity and trace deviation for stored operators.
const OPERATOR_TOL: f64 = 1e-10;

/// A `D x D` Hermitian trace-1 operator, stored row-major.
///
/// Operators tagged `raw` are unconstrained linear estimates: Hermitian and
/// trace-1 but possibly not positive semidefinite. Physical operators have
/// additionally been through eigenvalue clipping (or were built positive).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dim: usize,
    elems: Vec<C64>,
    raw: bool,
}

impl DensityOperator {
    fn checked(dim: usize, elems: Vec<C64>, raw: bool) -> Result<Self> {
        if dim == 0 || elems.len() != dim * dim {
            return Err(Error::invalid(
                "density operator",
                format!("expected {dim}x{dim} elements, got {}", elems.len()),
            ));
        }
        let op = DensityOperator { dim, elems, raw };
        let herm = op.hermiticity_deviation();
        if herm > OPERATOR_TOL {
            return Err(Error::invalid(
                "density operator",
                format!("not Hermitian: max |rho - rho^dagger| = {herm:.3e}"),
            ));
        }
        let tr = op.trace();
        if (tr - 1.0).abs() > OPERATOR_TOL {
            return Err(Error::invalid(
                "density operator",
                format!("trace deviates from 1 by {:.3e}", (tr - 1.0).abs()),
            ));
        }
        Ok(op)
    }

    /// Wraps a physical (positive, trace-1) matrix. Hermiticity and trace
    /// are validated; positivity is the caller's responsibility and can be
    /// audited via [`DensityOperator::eigenvalues`].
    pub fn physical(dim: usize, elems: Vec<C64>) -> Result<Self> {
        Self::checked(dim, elems, false)
    }

    /// Wraps an unconstrained linear estimate that may have negative
    /// eigenvalues.
    pub fn raw_estimate(dim: usize, elems: Vec<C64>) -> Result<Self> {
        Self::checked(dim, elems, true)
    }

    /// Rank-1 projector `|psi><psi|`.
    pub fn pure(psi: &QuditVector) -> Result<Self> {
        psi.check_unit()?;
        let dim = psi.dim();
        let a = psi.amplitudes();
        let elems = (0..dim * dim)
            .map(|idx| a[idx / dim] * a[idx % dim].conj())
            .collect();
        Ok(DensityOperator {
            dim,
            elems,
            raw: false,
        })
    }

    /// `I / D`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            elems[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        DensityOperator {
            dim,
            elems,
            raw: false,
        }
    }

    /// Crate-internal: reassemble from an eigensystem without re-validation.
    pub(crate) fn from_eigensystem(
        dim: usize,
        values: &[f64],
        vectors: &[Vec<C64>],
        raw: bool,
    ) -> Self {
        let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
        for (val, vec) in values.iter().zip(vectors) {
            for i in 0..dim {
                for j in 0..dim {
                    elems[i * dim + j] += val * vec[i] * vec[j].conj();
                }
            }
        }
        // Force exact Hermitian symmetry against round-off drift.
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (elems[i * dim + j] + elems[j * dim + i].conj());
                elems[i * dim + j] = avg;
                elems[j * dim + i] = avg.conj();
            }
            elems[i * dim + i] = C64::new(elems[i * dim + i].re, 0.0);
        }
        DensityOperator { dim, elems, raw }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major elements.
    pub fn elements(&self) -> &[C64] {
        &self.elems
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.elems[i * self.dim + j]
    }

    /// True for unconstrained linear estimates.
    pub fn is_raw(&self) -> bool {
        self.raw
    }

    /// Real part of the trace (imaginary part vanishes for Hermitian input).
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// Worst `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `Tr(rho^2)`, which for Hermitian matrices is the squared Frobenius
    /// norm `sum |rho_ij|^2`.
    pub fn purity(&self) -> f64 {
        self.elems.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<psi| rho |psi>` (real for Hermitian operators).
    pub fn expectation(&self, psi: &QuditVector) -> Result<f64> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: psi.dim(),
                right: self.dim,
            });
        }
        let a = psi.amplitudes();
        let mut total = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                total += a[i].conj() * self.get(i, j) * a[j];
            }
        }
        Ok(total.re)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(self.dim, &self.elems).0
    }

    /// Smallest eigenvalue; negative values flag unphysical estimates.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub(crate) fn eigensystem(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        linalg::hermitian_eigen(self.dim, &self.elems)
    }

    /// Worst elementwise difference to another operator.
    pub fn max_difference(&self, other: &DensityOperator) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self
            .elems
            .iter()
            .zip(&other.elems)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
