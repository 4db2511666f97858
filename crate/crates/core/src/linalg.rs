//! Small dense helpers on top of `nalgebra` for Hermitian matrices.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = hermitian_part(m);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Principal square root of a positive-semidefinite matrix. Eigenvalues
/// within round-off of zero (relative to the largest) are set to zero.
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = 64.0 * f64::EPSILON * top * n as f64;
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let s = if v > cut { v.sqrt() } else { 0.0 };
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    &scaled * vectors.adjoint()
}

/// Singular values in non-increasing order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank of a real matrix, relative tolerance `tol` against the
/// largest singular value.
pub fn real_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let s = m.clone().singular_values();
    let max = s.iter().copied().fold(0.0, f64::max);
    s.iter().filter(|&&v| v > tol * max).count()
}

/// Kronecker product `a ⊗ b` of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}
