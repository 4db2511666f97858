use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix};
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::gell_mann::hermitian_basis;
use super::measurement::{MeasurementRecord, ProjectorSet};
use super::state::{product_labels, subspace_modes, DensityMatrix};
use crate::linalg::{hermitian_eigen, real_rank};
use crate::optimize::{lbfgs, LbfgsConfig};
use crate::{Error, Result, C64};

/// Predicted probabilities below this are replaced by it in the χ²
/// denominator.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

const START_REGULARIZATION: f64 = 1e-8;
const RANDOM_SPREAD: f64 = 0.5;

/// `D² - 1` real parameters of a density matrix `ρ = T T† / tr(T T†)`.
///
/// The `D²` real entries of the lower-triangular factor `T` (diagonal first,
/// then real and imaginary parts of the off-diagonals in row-major order)
/// are normalized to unit length, which fixes the trace. The remaining
/// `D² - 1` coordinates are stereographic: `u_i = 2 x_i / (1 + |x|²)`,
/// `u_last = (|x|² - 1) / (1 + |x|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyParams {
    dim: usize,
    values: Vec<f64>,
}

impl CholeskyParams {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive"));
        }
        if values.len() != dim * dim - 1 {
            return Err(Error::DimensionMismatch { expected: dim * dim - 1, actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Cholesky parameter"));
        }
        Ok(Self { dim, values })
    }

    /// Parameters whose factor `T` is a scalar multiple of `factor`'s
    /// lower triangle.
    pub fn from_factor(factor: &DMatrix<C64>) -> Result<Self> {
        let dim = factor.nrows();
        if factor.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: factor.ncols() });
        }
        let mut u = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            u.push(factor[(i, i)].re);
        }
        for i in 0..dim {
            for k in 0..i {
                u.push(factor[(i, k)].re);
                u.push(factor[(i, k)].im);
            }
        }
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("Cholesky factor vanishes"));
        }
        u.iter_mut().for_each(|v| *v /= norm);
        let last = u.pop().unwrap_or(0.0);
        let denom = 1.0 - last;
        if denom < 1e-12 {
            return Err(Error::InvalidParameter("factor lies at the parametrization pole"));
        }
        Self::new(dim, u.iter().map(|v| v / denom).collect())
    }

    /// Parameters of `(ρ + εI) / (1 + Dε)` via its Cholesky factor.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let d = rho.dim();
        let eps = START_REGULARIZATION;
        let m = (rho.matrix() + DMatrix::<C64>::identity(d, d) * C64::new(eps, 0.0))
            * C64::new(1.0 / (1.0 + d as f64 * eps), 0.0);
        let chol = Cholesky::new(crate::linalg::hermitian_part(&m))
            .ok_or(Error::InvalidParameter("density matrix is not positive definite"))?;
        Self::from_factor(&chol.l())
    }

    /// Standard-normal factor entries from a ChaCha8 stream.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            for k in 0..=i {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if i == k { 0.0 } else { StandardNormal.sample(&mut rng) };
                t[(i, k)] = C64::new(re, im);
            }
        }
        Self::from_factor(&t)
    }

    /// Identity factor plus standard-normal noise of relative size
    /// `spread / sqrt(D)`. Random starts use this: factors with a vanishing
    /// diagonal entry can stall the fit at a rank-deficient point.
    pub fn perturbed_identity(dim: usize, spread: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = spread / (dim as f64).sqrt();
        let mut t = DMatrix::<C64>::identity(dim, dim);
        for i in 0..dim {
            for k in 0..=i {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if i == k { 0.0 } else { StandardNormal.sample(&mut rng) };
                t[(i, k)] += C64::new(re, im) * scale;
            }
        }
        Self::from_factor(&t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Unit-sphere coordinates `u` (length `D²`).
    fn sphere(x: &[f64]) -> Vec<f64> {
        let s: f64 = x.iter().map(|v| v * v).sum();
        let mut u: Vec<f64> = x.iter().map(|v| 2.0 * v / (1.0 + s)).collect();
        u.push((s - 1.0) / (1.0 + s));
        u
    }

    /// Pulls a gradient in `u` back to `x`.
    fn pull_back(x: &[f64], gu: &[f64], gx: &mut [f64]) {
        let s: f64 = x.iter().map(|v| v * v).sum();
        let a = 1.0 + s;
        let xg: f64 = x.iter().zip(gu).map(|(xi, gi)| xi * gi).sum();
        let gn = gu[x.len()];
        for (j, out) in gx.iter_mut().enumerate() {
            *out = 2.0 * gu[j] / a - 4.0 * x[j] * xg / (a * a) + 4.0 * x[j] * gn / (a * a);
        }
    }

    fn factor_from_sphere(dim: usize, u: &[f64]) -> DMatrix<C64> {
        let mut t = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            t[(i, i)] = C64::new(u[i], 0.0);
        }
        let mut idx = dim;
        for i in 0..dim {
            for k in 0..i {
                t[(i, k)] = C64::new(u[idx], u[idx + 1]);
                idx += 2;
            }
        }
        t
    }

    /// Lower-triangular factor with `tr(T T†) = 1`.
    pub fn factor(&self) -> DMatrix<C64> {
        Self::factor_from_sphere(self.dim, &Self::sphere(&self.values))
    }

    /// `T T†`; Hermitian, positive-semidefinite and unit-trace.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let t = self.factor();
        let m = &t * t.adjoint();
        let tr = m.trace().re;
        crate::linalg::hermitian_part(&m) * C64::new(1.0 / tr, 0.0)
    }
}

/// Records bound to their product kets, ready for repeated χ² evaluation.
struct Objective {
    dim: usize,
    /// Columns are the product kets `|s⟩ ⊗ |i⟩` of each record.
    kets: DMatrix<C64>,
    measured: Vec<f64>,
}

impl Objective {
    fn new(records: &[MeasurementRecord], set: &ProjectorSet) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidParameter("empty record set"));
        }
        let n = set.len();
        let dim = set.d() * set.d();
        let mut kets = DMatrix::<C64>::zeros(dim, records.len());
        for (c, r) in records.iter().enumerate() {
            if r.signal >= n || r.idler >= n {
                return Err(Error::InvalidParameter("record refers to an unknown projector"));
            }
            let v = set.product_ket(r.signal, r.idler);
            kets.column_mut(c).copy_from_slice(&v);
        }
        let measured = normalized_probabilities(records)?;
        Ok(Self { dim, kets, measured })
    }

    fn check(&self, params: &CholeskyParams) -> Result<()> {
        if params.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: params.dim() });
        }
        Ok(())
    }

    /// χ² at sphere point `u`; when `grad` is given it receives `dχ²/du`.
    fn eval(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let t = CholeskyParams::factor_from_sphere(self.dim, u);
        let a = t.adjoint() * &self.kets;
        let f: Vec<f64> = a.column_iter().map(|c| c.norm_squared()).collect();
        let total: f64 = f.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let mut value = 0.0;
        let mut dp = Vec::with_capacity(f.len());
        for (fr, &m) in f.iter().zip(&self.measured) {
            let p = fr / total;
            let diff = m - p;
            if p >= PROBABILITY_FLOOR {
                value += diff * diff / p;
                dp.push(1.0 - m * m / (p * p));
            } else {
                value += diff * diff / PROBABILITY_FLOOR;
                dp.push(-2.0 * diff / PROBABILITY_FLOOR);
            }
        }
        if let Some(grad) = grad {
            let mean: f64 = dp.iter().zip(&f).map(|(c, fr)| c * fr / total).sum();
            let mut weighted = self.kets.clone();
            for (c, mut col) in weighted.column_iter_mut().enumerate() {
                col *= C64::new((dp[c] - mean) / total, 0.0);
            }
            let g = weighted * a.adjoint();
            let d = self.dim;
            for i in 0..d {
                grad[i] = 2.0 * g[(i, i)].re;
            }
            let mut idx = d;
            for i in 0..d {
                for k in 0..i {
                    grad[idx] = 2.0 * g[(i, k)].re;
                    grad[idx + 1] = 2.0 * g[(i, k)].im;
                    idx += 2;
                }
            }
        }
        value
    }

    fn eval_params(&self, x: &[f64], gx: &mut [f64]) -> f64 {
        let u = CholeskyParams::sphere(x);
        let mut gu = vec![0.0; u.len()];
        let v = self.eval(&u, Some(&mut gu));
        CholeskyParams::pull_back(x, &gu, gx);
        v
    }
}

fn normalized_probabilities(records: &[MeasurementRecord]) -> Result<Vec<f64>> {
    if records.iter().any(|r| !(r.probability >= 0.0) || !r.probability.is_finite()) {
        return Err(Error::InvalidParameter("record probabilities must be finite and non-negative"));
    }
    let sum: f64 = records.iter().map(|r| r.probability).sum();
    if !(sum > 0.0) {
        return Err(Error::InvalidParameter("record probabilities sum to zero"));
    }
    Ok(records.iter().map(|r| r.probability / sum).collect())
}

/// Pearson χ² `Σ (p_M - p_P)² / max(p_P, floor)`, with predicted
/// probabilities normalized over the record set.
pub fn chi2(params: &CholeskyParams, records: &[MeasurementRecord], set: &ProjectorSet) -> Result<f64> {
    let obj = Objective::new(records, set)?;
    obj.check(params)?;
    Ok(obj.eval(&CholeskyParams::sphere(params.as_slice()), None))
}

/// χ² and its analytic gradient with respect to the parameters.
pub fn chi2_with_gradient(
    params: &CholeskyParams,
    records: &[MeasurementRecord],
    set: &ProjectorSet,
) -> Result<(f64, Vec<f64>)> {
    let obj = Objective::new(records, set)?;
    obj.check(params)?;
    let mut g = vec![0.0; params.len()];
    let v = obj.eval_params(params.as_slice(), &mut g);
    Ok((v, g))
}

/// Rank of the two-photon measurement map restricted to the given records.
fn record_rank(records: &[MeasurementRecord], set: &ProjectorSet) -> usize {
    let n = set.len();
    let mut seen = vec![false; n * n];
    for r in records {
        seen[r.signal * n + r.idler] = true;
    }
    if seen.iter().all(|&s| s) {
        return set.single_rank() * set.single_rank();
    }
    let dd = set.d() * set.d();
    let map = set.map();
    let rows: Vec<usize> = (0..n * n).filter(|&k| seen[k]).collect();
    let mut m = DMatrix::<f64>::zeros(rows.len(), dd * dd);
    for (row, &k) in rows.iter().enumerate() {
        let (s, i) = (k / n, k % n);
        for a in 0..dd {
            for b in 0..dd {
                m[(row, a * dd + b)] = map[(s, a)] * map[(i, b)];
            }
        }
    }
    real_rank(&m, 1e-10)
}

/// Least-squares estimate from a complete product grid of records,
/// projected onto the density matrices (negative eigenvalues clipped).
pub fn linear_inversion(records: &[MeasurementRecord], set: &ProjectorSet) -> Result<DensityMatrix> {
    let n = set.len();
    let d = set.d();
    let dd = d * d;
    let probs = normalized_probabilities(records)?;
    let mut grid = DMatrix::<f64>::zeros(n, n);
    let mut seen = vec![false; n * n];
    for (r, p) in records.iter().zip(&probs) {
        if r.signal >= n || r.idler >= n {
            return Err(Error::InvalidParameter("record refers to an unknown projector"));
        }
        grid[(r.signal, r.idler)] += p;
        seen[r.signal * n + r.idler] = true;
    }
    let missing = seen.iter().filter(|&&s| !s).count();
    if missing > 0 {
        return Err(Error::IncompleteMeasurements { rank: n * n - missing, required: n * n });
    }
    let pinv = set
        .map()
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|_| Error::InvalidParameter("measurement map pseudo-inverse failed"))?;
    let coeffs = &pinv * grid * pinv.transpose();
    let basis = hermitian_basis(d)?;
    let big = dd;
    let mut m = DMatrix::<C64>::zeros(big, big);
    for a in 0..dd {
        for b in 0..dd {
            let c = coeffs[(a, b)];
            if c == 0.0 {
                continue;
            }
            for r1 in 0..d {
                for c1 in 0..d {
                    let x = basis[a][(r1, c1)];
                    if x == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for r2 in 0..d {
                        for c2 in 0..d {
                            m[(r1 * d + r2, c1 * d + c2)] += x * basis[b][(r2, c2)] * c;
                        }
                    }
                }
            }
        }
    }
    let (values, vectors) = hermitian_eigen(&m);
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::InvalidParameter("linear inversion produced no positive weight"));
    }
    let mut scaled = vectors.clone();
    for (c, v) in clipped.iter().enumerate() {
        scaled.column_mut(c).scale_mut(v / sum);
    }
    let rho = crate::linalg::hermitian_part(&(scaled * vectors.adjoint()));
    Ok(DensityMatrix::from_parts(rho, product_labels(&subspace_modes(d)?)))
}

/// Starting point of the first optimizer run; further starts are random.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialGuess {
    /// Linear inversion when the records form a complete grid, otherwise
    /// the maximally mixed state.
    LinearInversion,
    MaximallyMixed,
    /// Seeded perturbation of the identity factor.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    pub lbfgs: LbfgsConfig,
    /// Number of optimizer runs; `None` picks 5 for `D >= 36` and 1 below.
    pub starts: Option<usize>,
    pub seed: u64,
    pub initial: InitialGuess,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self { lbfgs: LbfgsConfig::default(), starts: None, seed: 0, initial: InitialGuess::LinearInversion }
    }
}

impl ReconstructionConfig {
    pub fn starts_for(&self, dim: usize) -> usize {
        self.starts.unwrap_or(if dim >= 36 { 5 } else { 1 }).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub evaluations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub starts: usize,
    pub best_start: usize,
    /// Final χ² of each start.
    pub start_chi2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub rho: DensityMatrix,
    pub params: CholeskyParams,
    pub chi2: f64,
    pub diagnostics: Diagnostics,
}

/// Fits a density matrix to the records by minimizing χ².
///
/// Non-convergence is not an error: the best point found is returned with
/// `diagnostics.converged == false`.
pub fn reconstruct(
    records: &[MeasurementRecord],
    set: &ProjectorSet,
    config: &ReconstructionConfig,
) -> Result<Reconstruction> {
    let obj = Objective::new(records, set)?;
    let dim = obj.dim;
    let required = dim * dim;
    let rank = record_rank(records, set);
    if rank < required {
        return Err(Error::IncompleteMeasurements { rank, required });
    }
    let labels = product_labels(&subspace_modes(set.d())?);
    let starts = config.starts_for(dim);
    let mut best: Option<(usize, crate::optimize::LbfgsResult)> = None;
    let mut start_chi2 = Vec::with_capacity(starts);
    let mut iterations = 0;
    let mut evaluations = 0;
    for start in 0..starts {
        let seed = config.seed.wrapping_add(start as u64);
        let x0 = if start == 0 {
            match config.initial {
                InitialGuess::LinearInversion => match linear_inversion(records, set) {
                    Ok(rho) => CholeskyParams::from_density(&rho)?,
                    Err(_) => CholeskyParams::from_density(&DensityMatrix::maximally_mixed(labels.clone()))?,
                },
                InitialGuess::MaximallyMixed => {
                    CholeskyParams::from_density(&DensityMatrix::maximally_mixed(labels.clone()))?
                }
                InitialGuess::Random => CholeskyParams::perturbed_identity(dim, RANDOM_SPREAD, seed)?,
            }
        } else {
            CholeskyParams::perturbed_identity(dim, RANDOM_SPREAD, seed)?
        };
        let result = lbfgs(|x, g| obj.eval_params(x, g), x0.as_slice(), &config.lbfgs);
        iterations += result.iterations;
        evaluations += result.evaluations;
        start_chi2.push(result.value);
        if best.as_ref().is_none_or(|(_, b)| result.value < b.value) {
            best = Some((start, result));
        }
    }
    let (best_start, result) = best.ok_or(Error::InvalidParameter("no optimizer start"))?;
    let params = CholeskyParams::new(dim, result.x)?;
    let rho = DensityMatrix::from_parts(params.to_matrix(), labels);
    Ok(Reconstruction {
        rho,
        params,
        chi2: result.value,
        diagnostics: Diagnostics {
            iterations,
            evaluations,
            grad_norm: result.grad_norm,
            converged: result.converged,
            starts,
            best_start,
            start_chi2,
        },
    })
}
