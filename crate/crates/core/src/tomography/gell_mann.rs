use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// The `d² - 1` generalized Gell-Mann matrices: symmetric `E_jk + E_kj`,
/// antisymmetric `-i(E_jk - E_kj)` (both for `j < k`), then the diagonal
/// family. All are traceless with `tr(G_a G_b) = 2 δ_ab`.
pub fn gell_mann_basis(d: usize) -> Result<Vec<DMatrix<C64>>> {
    if d < 2 {
        return Err(Error::InvalidParameter("Gell-Mann basis needs d >= 2"));
    }
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = DMatrix::zeros(d, d);
            m[(j, k)] = one;
            m[(k, j)] = one;
            out.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = DMatrix::zeros(d, d);
            m[(j, k)] = -i;
            m[(k, j)] = i;
            out.push(m);
        }
    }
    for l in 1..d {
        let lf = l as f64;
        let c = (2.0 / (lf * (lf + 1.0))).sqrt();
        let mut m = DMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = C64::new(c, 0.0);
        }
        m[(l, l)] = C64::new(-c * lf, 0.0);
        out.push(m);
    }
    Ok(out)
}

/// Hilbert-Schmidt orthonormal Hermitian basis: `I/√d` followed by the
/// Gell-Mann matrices divided by `√2`.
pub fn hermitian_basis(d: usize) -> Result<Vec<DMatrix<C64>>> {
    let mut out = Vec::with_capacity(d * d);
    out.push(DMatrix::identity(d, d) * C64::new(1.0 / (d as f64).sqrt(), 0.0));
    let s = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    out.extend(gell_mann_basis(d)?.into_iter().map(|g| g * s));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_for_qubits() {
        let g = gell_mann_basis(2).unwrap();
        assert_eq!(g.len(), 3);
        let x = &g[0];
        let y = &g[1];
        let z = &g[2];
        assert_eq!(x[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(y[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], C64::new(0.0, 1.0));
        assert!((z[(0, 0)].re - 1.0).abs() < 1e-15 && (z[(1, 1)].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn counts_and_orthogonality() {
        assert_eq!(gell_mann_basis(3).unwrap().len(), 8);
        let g = gell_mann_basis(6).unwrap();
        assert_eq!(g.len(), 35);
        for (a, ga) in g.iter().enumerate() {
            assert!(ga.trace().norm() < 1e-14);
            assert!((ga - ga.adjoint()).norm() < 1e-15);
            for (b, gb) in g.iter().enumerate() {
                let t = (ga * gb).trace();
                let expect = if a == b { 2.0 } else { 0.0 };
                assert!((t.re - expect).abs() < 1e-13 && t.im.abs() < 1e-13);
            }
        }
        assert!(gell_mann_basis(1).is_err());
    }
}
