//! Thin wrappers over nalgebra's dense symmetric/Hermitian eigensolvers.

use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
/// Column `k` of the returned matrix is the eigenvector for `values[k]`.
pub fn symmetric_eigen(matrix: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = matrix.nrows();
    let eig = SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix stored row-major, sorted descending.
pub fn hermitian_eigenvalues(dim: usize, row_major: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(row_major.len(), dim * dim);
    let m = DMatrix::from_fn(dim, dim, |r, c| row_major[r * dim + c]);
    let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Full eigen-decomposition of a Hermitian matrix (values unsorted).
pub fn hermitian_eigen(matrix: DMatrix<Complex64>) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    SymmetricEigen::new(matrix)
}
