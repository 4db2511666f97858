use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::gell_mann::hermitian_basis;
use super::state::DensityMatrix;
use crate::linalg::real_rank;
use crate::{Error, Result, C64};

const RANK_TOL: f64 = 1e-10;

/// Which Gell-Mann eigenvectors make up a single-photon projector set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorScheme {
    /// Computational kets plus the `±1` eigenvectors of every off-diagonal
    /// Gell-Mann matrix: `(|j⟩ ± |k⟩)/√2` and `(|j⟩ ± i|k⟩)/√2`,
    /// `d + 2d(d-1)` kets.
    Full,
    /// Computational kets plus `(|j⟩ + |k⟩)/√2` and `(|j⟩ + i|k⟩)/√2`,
    /// exactly `d²` kets.
    Minimal,
}

/// Single-photon measurement kets, applied to both photons.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    d: usize,
    kets: Vec<DVector<C64>>,
    /// `map[(r, α)] = ⟨ψ_r| B_α |ψ_r⟩` for the orthonormal Hermitian basis.
    map: DMatrix<f64>,
}

/// Projector set used for `d` modes: [`ProjectorScheme::Full`] up to
/// `d = 3` (15 kets), [`ProjectorScheme::Minimal`] above (36 kets at
/// `d = 6`).
pub fn projector_set(d: usize) -> Result<ProjectorSet> {
    projector_set_with(d, if d <= 3 { ProjectorScheme::Full } else { ProjectorScheme::Minimal })
}

pub fn projector_set_with(d: usize, scheme: ProjectorScheme) -> Result<ProjectorSet> {
    if d < 2 {
        return Err(Error::InvalidParameter("projector set needs d >= 2"));
    }
    let one = C64::new(1.0, 0.0);
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let ri = C64::new(0.0, FRAC_1_SQRT_2);
    let mut kets = Vec::new();
    for j in 0..d {
        let mut v = DVector::zeros(d);
        v[j] = one;
        kets.push(v);
    }
    let signs: &[f64] = match scheme {
        ProjectorScheme::Full => &[1.0, -1.0],
        ProjectorScheme::Minimal => &[1.0],
    };
    for phase in [r, ri] {
        for j in 0..d {
            for k in j + 1..d {
                for &s in signs {
                    let mut v = DVector::zeros(d);
                    v[j] = r;
                    v[k] = phase * s;
                    kets.push(v);
                }
            }
        }
    }
    let basis = hermitian_basis(d)?;
    let map = DMatrix::from_fn(kets.len(), d * d, |row, a| (kets[row].adjoint() * &basis[a] * &kets[row])[(0, 0)].re);
    let set = ProjectorSet { d, kets, map };
    let rank = set.single_rank();
    if rank < d * d {
        return Err(Error::IncompleteMeasurements { rank, required: d * d });
    }
    Ok(set)
}

impl ProjectorSet {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kets(&self) -> &[DVector<C64>] {
        &self.kets
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    /// Rank of the single-photon measurement map on Hermitian operators.
    pub fn single_rank(&self) -> usize {
        real_rank(&self.map, RANK_TOL)
    }

    /// Real single-photon measurement map (rows: kets, columns: Hermitian
    /// basis coordinates).
    pub fn map(&self) -> &DMatrix<f64> {
        &self.map
    }

    /// Rank of the two-photon map built explicitly over every product
    /// `|ψ_s⟩|ψ_i⟩`. Equals `single_rank()²`; this is the direct check.
    pub fn product_rank(&self) -> usize {
        let n = self.len();
        let dd = self.d * self.d;
        let mut m = DMatrix::<f64>::zeros(n * n, dd * dd);
        for s in 0..n {
            for i in 0..n {
                for a in 0..dd {
                    for b in 0..dd {
                        m[(s * n + i, a * dd + b)] = self.map[(s, a)] * self.map[(i, b)];
                    }
                }
            }
        }
        real_rank(&m, RANK_TOL)
    }

    /// `|ψ_s⟩ ⊗ |ψ_i⟩`.
    pub fn product_ket(&self, signal: usize, idler: usize) -> Vec<C64> {
        crate::linalg::kron_vec(self.kets[signal].as_slice(), self.kets[idler].as_slice())
    }
}

/// One joint projection with its raw value and its share of the record set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub signal: usize,
    pub idler: usize,
    /// Born probability or sampled count.
    pub counts: f64,
    /// `counts` normalized to unit sum over the record set.
    pub probability: f64,
}

/// `⟨s ⊗ i| ρ |s ⊗ i⟩`, clipped to `[0, 1]`.
pub fn born_probability(rho: &DensityMatrix, signal: &DVector<C64>, idler: &DVector<C64>) -> Result<f64> {
    let v = crate::linalg::kron_vec(signal.as_slice(), idler.as_slice());
    if v.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: v.len() });
    }
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for (r, vr) in v.iter().enumerate() {
        let mut row = C64::new(0.0, 0.0);
        for (c, vc) in v.iter().enumerate() {
            row += m[(r, c)] * vc;
        }
        acc += vr.conj() * row;
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Counting noise applied to simulated records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    None,
    Poisson { seed: u64 },
}

/// Records for every product of two kets in `set`.
///
/// Without noise `counts` are the Born probabilities. With Poisson noise
/// they are drawn with mean `total · p`, `p` the Born probability
/// normalized over the set, from a ChaCha8 stream seeded by `seed`.
pub fn simulate_counts(
    rho: &DensityMatrix,
    set: &ProjectorSet,
    total: u64,
    noise: Noise,
) -> Result<Vec<MeasurementRecord>> {
    if total == 0 {
        return Err(Error::InvalidParameter("total counts must be positive"));
    }
    let n = set.len();
    let mut born = vec![0.0; n * n];
    for s in 0..n {
        for i in 0..n {
            born[s * n + i] = born_probability(rho, &set.kets[s], &set.kets[i])?;
        }
    }
    let born_sum: f64 = born.iter().sum();
    let counts: Vec<f64> = match noise {
        Noise::None => born,
        Noise::Poisson { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(born.len());
            for p in born {
                let mean = total as f64 * p / born_sum;
                out.push(if mean > 0.0 {
                    Poisson::new(mean).map_err(|_| Error::InvalidParameter("invalid Poisson mean"))?.sample(&mut rng)
                } else {
                    0.0
                });
            }
            out
        }
    };
    let sum: f64 = counts.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::InvalidParameter("simulated record set is empty"));
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(r, &c)| MeasurementRecord { signal: r / n, idler: r % n, counts: c, probability: c / sum })
        .collect())
}
