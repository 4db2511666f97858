use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bell::BellState;
use crate::biphoton::CoefficientTensor;
use crate::hermite::ModePair;
use crate::linalg::{hermitian_eigen, psd_sqrt, singular_values};
use crate::{Error, Result, C64};

const TOL: f64 = 1e-10;

/// First `d` single-photon modes in order of total order `n + m`, then by
/// decreasing `n`: HG00, HG10, HG01, HG20, HG11, HG02, HG30, ...
pub fn subspace_modes(d: usize) -> Result<Vec<ModePair>> {
    if d < 2 {
        return Err(Error::InvalidParameter("subspace needs at least two modes"));
    }
    let mut out = Vec::with_capacity(d);
    let mut order = 0;
    while out.len() < d {
        for n in (0..=order).rev() {
            if out.len() < d {
                out.push(ModePair::new(n, order - n));
            }
        }
        order += 1;
    }
    Ok(out)
}

/// Two-photon labels `(signal, idler)` in row-major product order.
pub fn product_labels(modes: &[ModePair]) -> Vec<(ModePair, ModePair)> {
    modes.iter().flat_map(|&s| modes.iter().map(move |&i| (s, i))).collect()
}

/// Hermitian, positive-semidefinite, unit-trace operator with mode labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
    labels: Vec<(ModePair, ModePair)>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>, labels: Vec<(ModePair, ModePair)>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != labels.len() {
            return Err(Error::DimensionMismatch { expected: labels.len(), actual: matrix.nrows() });
        }
        let s = Self { matrix, labels };
        s.validate()?;
        Ok(s)
    }

    /// Unchecked constructor for matrices that are valid by construction.
    pub(crate) fn from_parts(matrix: DMatrix<C64>, labels: Vec<(ModePair, ModePair)>) -> Self {
        Self { matrix, labels }
    }

    pub fn from_pure(ket: &[C64], labels: Vec<(ModePair, ModePair)>) -> Result<Self> {
        let norm: f64 = ket.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("state vector vanishes"));
        }
        let v = nalgebra::DVector::from_iterator(ket.len(), ket.iter().map(|c| c / norm));
        Self::new(&v * v.adjoint(), labels)
    }

    pub fn maximally_mixed(labels: Vec<(ModePair, ModePair)>) -> Self {
        let n = labels.len();
        Self { matrix: DMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0), labels }
    }

    /// Hermiticity, trace and positivity within 1e-10.
    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        if (m - m.adjoint()).camax() > TOL {
            return Err(Error::InvalidParameter("density matrix is not Hermitian"));
        }
        if (m.trace().re - 1.0).abs() > TOL || m.trace().im.abs() > TOL {
            return Err(Error::InvalidParameter("density matrix trace differs from one"));
        }
        let (values, _) = hermitian_eigen(m);
        if values.first().is_some_and(|&v| v < -TOL) {
            return Err(Error::InvalidParameter("density matrix has a negative eigenvalue"));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[(ModePair, ModePair)] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// Pure state of a coefficient tensor restricted to `d` modes per
    /// photon, with the weight it carried inside that subspace.
    pub fn from_tensor(tensor: &CoefficientTensor, d: usize) -> Result<(Self, f64)> {
        let modes = subspace_modes(d)?;
        let labels = product_labels(&modes);
        let ket: Vec<C64> = labels.iter().map(|&(s, i)| tensor.amplitude(s, i)).collect();
        let weight = ket.iter().map(|c| c.norm_sqr()).sum::<f64>() / tensor.total_weight();
        if weight < 1e-12 {
            return Err(Error::DegenerateSubspace { weight });
        }
        Ok((Self::from_pure(&ket, labels)?, weight))
    }
}

/// Ideal Bell state over `{HG00, HG10}⊗²` embedded in the `d`-mode product
/// space.
pub fn bell_density(target: BellState, d: usize) -> Result<DensityMatrix> {
    let modes = subspace_modes(d)?;
    let labels = product_labels(&modes);
    let ket4 = target.ket();
    let mut ket = vec![C64::new(0.0, 0.0); d * d];
    for s in 0..2 {
        for i in 0..2 {
            ket[s * d + i] = ket4[2 * s + i];
        }
    }
    DensityMatrix::from_pure(&ket, labels)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(σ) ρ sqrt(σ)))²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), actual: rho.dim() });
    }
    // nuclear norm of sqrt(ρ) sqrt(σ); avoids square roots of round-off
    // eigenvalues of sqrt(σ) ρ sqrt(σ)
    let product = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    let t: f64 = singular_values(&product).iter().sum();
    Ok((t * t).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_orderings() {
        let m = subspace_modes(6).unwrap();
        let expect = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
        for (p, e) in m.iter().zip(expect) {
            assert_eq!((p.n, p.m), e);
        }
        assert_eq!(subspace_modes(3).unwrap(), m[..3].to_vec());
    }

    #[test]
    fn fidelity_examples() {
        let plus = bell_density(BellState::PsiPlus, 2).unwrap();
        let minus = bell_density(BellState::PsiMinus, 2).unwrap();
        assert!((fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-10);
        assert!(fidelity(&plus, &minus).unwrap() < 1e-10);
        let mixed = DensityMatrix::maximally_mixed(plus.labels().to_vec());
        assert!((fidelity(&plus, &mixed).unwrap() - 0.25).abs() < 1e-10);
        assert!((fidelity(&mixed, &plus).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let labels = product_labels(&subspace_modes(2).unwrap());
        let mut m = DMatrix::identity(4, 4) * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m.clone(), labels.clone()).is_err());
        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.2, 0.0),
            C64::new(-0.2, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        assert!(DensityMatrix::new(neg, labels).is_err());
    }
}
