//! Thin wrappers around the dense eigen-solver.
//!
//! All spectral work in this crate goes through these two functions so the
//! backing implementation stays swappable in one place.

use nalgebra::DMatrix;

use crate::C64;

/// Eigendecomposition of a Hermitian matrix given in row-major order.
///
/// Returns eigenvalues in ascending order with matching unit-norm
/// eigenvectors. Only the Hermitian part of the input is used; callers are
/// expected to pass matrices that are Hermitian up to round-off.
pub(crate) fn hermitian_eigen(dim: usize, elems: &[C64]) -> (Vec<f64>, Vec<Vec<C64>>) {
    assert_eq!(elems.len(), dim * dim, "element count must be dim^2");
    // Symmetrize to guard the solver against round-off asymmetry.
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        0.5 * (elems[i * dim + j] + elems[j * dim + i].conj())
    });
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Rank of a real symmetric matrix: eigenvalues above `tol` in magnitude.
#[cfg(test)]
pub(crate) fn symmetric_rank(dim: usize, elems: &[f64], tol: f64) -> usize {
    assert_eq!(elems.len(), dim * dim);
    let m = DMatrix::from_row_slice(dim, dim, elems);
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .filter(|v| v.abs() > tol)
        .count()
}
