//! The two-photon amplitude `Ψ(k_s, k_i) ∝ E_p(k_s + k_i) κ(k_s - k_i)` and
//! its decomposition into products of Hermite-Gaussian modes.
//!
//! All integrals are evaluated in sum/difference coordinates
//! `K+ = k_s + k_i`, `K- = k_s - k_i` (Jacobian 1/2 per axis). There the
//! Gaussian part of the detection modes separates,
//! `exp(-σ²(k_s² + k_i²)/2) = exp(-σ²(K+² + K-²)/4)`, the pump depends only on
//! `K+` and the phase matching only on `K-`, so a Gauss-Hermite grid scaled
//! to each direction integrates the double-Gaussian case exactly and the
//! sinc case converges quickly.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::hermite::{hg_modes, ModeIndex, ModePair, ModeWidth};
use crate::quadrature::{gauss_hermite_grid, QuadratureGrid};
use crate::{Error, Result, C64};

/// Default truncation: orders `0..=6` on every index.
pub const DEFAULT_N_MAX: ModeIndex = 6;
/// Nodes per direction for the two-dimensional per-axis integrals.
pub const AXIS_POINTS: usize = 64;
/// Nodes per direction for the four-dimensional integrals.
pub const FULL_POINTS: usize = 48;
/// Largest accepted node count per direction.
pub const MAX_POINTS: usize = 256;
/// Captured weight below which a decomposition is flagged as truncated.
pub const TRUNCATION_THRESHOLD: f64 = 0.99;

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Phase-matching function of the crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMatchKernel {
    /// `sinc(L |Δk|² / (4 k_p))` for crystal length `L` and pump wavenumber
    /// `k_p` inside the crystal.
    Sinc { length: f64, pump_wavenumber: f64 },
    /// `exp(-δ² |Δk|²)`.
    Gaussian { delta: f64 },
}

impl PhaseMatchKernel {
    pub fn sinc(length: f64, pump_wavenumber: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0 && pump_wavenumber.is_finite() && pump_wavenumber > 0.0) {
            return Err(Error::InvalidParameter("crystal length and pump wavenumber must be positive"));
        }
        Ok(Self::Sinc { length, pump_wavenumber })
    }

    pub fn gaussian(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter("phase-matching width must be positive"));
        }
        Ok(Self::Gaussian { delta })
    }

    /// Angular width `δ`; for the sinc form `δ = sqrt(L / (4 k_p))`.
    pub fn delta(&self) -> f64 {
        match *self {
            Self::Sinc { length, pump_wavenumber } => (length / (4.0 * pump_wavenumber)).sqrt(),
            Self::Gaussian { delta } => delta,
        }
    }

    /// The double-Gaussian stand-in with the same `δ`.
    pub fn to_gaussian(&self) -> Self {
        Self::Gaussian { delta: self.delta() }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Self::Gaussian { .. })
    }

    /// Kernel value as a function of `|Δk|²`.
    #[inline]
    pub fn value_sq(&self, dk_sq: f64) -> f64 {
        let d = self.delta();
        match self {
            Self::Sinc { .. } => sinc(d * d * dk_sq),
            Self::Gaussian { .. } => (-d * d * dk_sq).exp(),
        }
    }

    /// `∫ |κ(q)|² d²q` over the transverse plane.
    fn plane_norm_sq(&self) -> f64 {
        let d2 = self.delta() * self.delta();
        match self {
            // ∫_0^∞ sinc²(s) ds = π/2
            Self::Sinc { .. } => PI / d2 * (PI / 2.0),
            Self::Gaussian { .. } => PI / (2.0 * d2),
        }
    }
}

/// Phase-matching factor for a transverse momentum mismatch `dk`.
pub fn kernel_value(kernel: &PhaseMatchKernel, dk: [f64; 2]) -> f64 {
    kernel.value_sq(dk[0] * dk[0] + dk[1] * dk[1])
}

/// Coherent superposition of HG pump modes sharing one width parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpec {
    terms: Vec<(ModePair, C64)>,
    width: ModeWidth,
}

impl PumpSpec {
    /// Validates `Σ|c|² = 1` within 1e-12 and rejects an empty or
    /// duplicated term list.
    pub fn new(terms: Vec<(ModePair, C64)>, width: ModeWidth) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("pump needs at least one mode"));
        }
        for (i, (mode, _)) in terms.iter().enumerate() {
            if terms[..i].iter().any(|(other, _)| other == mode) {
                return Err(Error::InvalidParameter("pump modes must be distinct"));
            }
        }
        let norm: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("pump amplitudes must satisfy Σ|c|² = 1"));
        }
        Ok(Self { terms, width })
    }

    /// Rescales the amplitudes to unit norm before validating.
    pub fn normalized(terms: Vec<(ModePair, C64)>, width: ModeWidth) -> Result<Self> {
        let norm: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("pump amplitudes vanish"));
        }
        Self::new(terms.into_iter().map(|(m, c)| (m, c / norm)).collect(), width)
    }

    pub fn single(mode: ModePair, width: ModeWidth) -> Self {
        Self { terms: vec![(mode, C64::new(1.0, 0.0))], width }
    }

    pub fn terms(&self) -> &[(ModePair, C64)] {
        &self.terms
    }

    pub fn width(&self) -> ModeWidth {
        self.width
    }

    pub fn max_order(&self) -> ModeIndex {
        self.terms.iter().map(|(p, _)| p.n.max(p.m)).max().unwrap_or(0)
    }

    /// Same pump with every amplitude multiplied by `phase`.
    pub fn with_global_phase(&self, phase: C64) -> Result<Self> {
        Self::new(self.terms.iter().map(|&(m, c)| (m, c * phase)).collect(), self.width)
    }

    /// Pump angular spectrum `E_p(q)`.
    pub fn field(&self, q: [f64; 2]) -> C64 {
        let order = self.max_order();
        let mut hx = vec![0.0; order + 1];
        let mut hy = vec![0.0; order + 1];
        hg_modes(q[0], self.width, &mut hx);
        hg_modes(q[1], self.width, &mut hy);
        self.terms.iter().map(|&(p, c)| c * (hx[p.n] * hy[p.m])).sum()
    }
}

/// Unnormalized `Ψ(k_s, k_i) = E_p(k_s + k_i) κ(k_s - k_i)`.
pub fn biphoton_amplitude(pump: &PumpSpec, kernel: &PhaseMatchKernel, ks: [f64; 2], ki: [f64; 2]) -> C64 {
    let q = [ks[0] + ki[0], ks[1] + ki[1]];
    pump.field(q) * kernel_value(kernel, [ks[0] - ki[0], ks[1] - ki[1]])
}

/// Position-space pump waist `w_p = sqrt(L / k_p)` whose Rayleigh range is
/// half the crystal length, returned as the corresponding mode width.
pub fn waist_from_crystal(length: f64, pump_wavenumber: f64) -> Result<ModeWidth> {
    if !(length > 0.0 && pump_wavenumber > 0.0) {
        return Err(Error::InvalidParameter("crystal length and pump wavenumber must be positive"));
    }
    ModeWidth::from_waist((length / pump_wavenumber).sqrt())
}

/// Detection width that makes a Gaussian pump of width `pump` and a
/// Gaussian kernel of width `delta` diagonal in the HG basis.
///
/// With envelope widths `v = w/sqrt(2)` (pump) and `δ` (kernel) the
/// double-Gaussian amplitude is a Mehler kernel in modes of width
/// `σ² = 4 v δ`. At `v = δ` this gives `σ = w_p`, i.e. a detection waist of
/// `sqrt(2) w_p`.
pub fn matched_detection_width(pump: ModeWidth, delta: f64) -> Result<ModeWidth> {
    ModeWidth::new((4.0 * pump.envelope() * delta).sqrt())
}

/// Pump width that reaches the single-Schmidt-mode point `K = 1` for a
/// kernel of width `delta`.
pub fn single_mode_pump_width(delta: f64) -> Result<ModeWidth> {
    ModeWidth::from_envelope(delta)
}

/// Per-axis coefficients `C^{(n)}_{ju}` (rows: signal order `j`, columns:
/// idler order `u`).
#[derive(Debug, Clone, PartialEq)]
pub struct AxisCoefficientMatrix {
    pub data: DMatrix<C64>,
    pub pump_order: ModeIndex,
    /// Norm² of the raw coefficients relative to the full amplitude norm.
    pub captured_weight: f64,
}

impl AxisCoefficientMatrix {
    pub fn n_max(&self) -> ModeIndex {
        self.data.nrows() - 1
    }

    pub fn get(&self, j: ModeIndex, u: ModeIndex) -> C64 {
        self.data[(j, u)]
    }

    pub fn probabilities(&self) -> DMatrix<f64> {
        self.data.map(|c| c.norm_sqr())
    }

    pub fn is_truncated(&self) -> bool {
        self.captured_weight < TRUNCATION_THRESHOLD
    }

    /// Slice `C_{j k u t}` at fixed `(k, t)` (axis `X`) or fixed `(j, u)`
    /// (axis `Y`), renormalized. The captured weight is the slice's share of
    /// the tensor's norm times the tensor's own captured weight.
    pub fn slice(tensor: &CoefficientTensor, axis: Axis, fixed: (ModeIndex, ModeIndex)) -> Result<Self> {
        let d = tensor.dim();
        let data = DMatrix::from_fn(d, d, |a, b| match axis {
            Axis::X => tensor.get(a, fixed.0, b, fixed.1),
            Axis::Y => tensor.get(fixed.0, a, fixed.1, b),
        });
        let w: f64 = data.iter().map(|c| c.norm_sqr()).sum();
        if w < 1e-300 {
            return Err(Error::DegenerateSubspace { weight: w });
        }
        Ok(Self { data: data / C64::new(w.sqrt(), 0.0), pump_order: 0, captured_weight: w * tensor.captured_weight })
    }
}

/// Transverse axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Normalized amplitudes `C_{j k u t}` of
/// `Σ C_{jkut} |HG_jk, σ⟩_s |HG_ut, σ⟩_i` on the truncation `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    n_max: ModeIndex,
    data: Vec<C64>,
    /// Raw in-truncation norm² relative to the full amplitude norm, before
    /// renormalization.
    pub captured_weight: f64,
    pub pump_width: Option<ModeWidth>,
    pub detection_width: Option<ModeWidth>,
}

impl CoefficientTensor {
    /// Builds a tensor from an amplitude function and normalizes it.
    /// `captured_weight` is set to 1.
    pub fn from_fn(n_max: ModeIndex, f: impl Fn(ModeIndex, ModeIndex, ModeIndex, ModeIndex) -> C64) -> Result<Self> {
        let d = n_max + 1;
        let mut data = Vec::with_capacity(d * d * d * d);
        for j in 0..d {
            for k in 0..d {
                for u in 0..d {
                    for t in 0..d {
                        data.push(f(j, k, u, t));
                    }
                }
            }
        }
        let norm: f64 = data.iter().map(|c| c.norm_sqr()).sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("tensor has zero norm"));
        }
        let s = norm.sqrt();
        data.iter_mut().for_each(|c| *c /= s);
        Ok(Self { n_max, data, captured_weight: 1.0, pump_width: None, detection_width: None })
    }

    /// `C_{jkut} = C^x_{ju} C^y_{kt}`.
    pub fn from_axis_product(x: &AxisCoefficientMatrix, y: &AxisCoefficientMatrix) -> Result<Self> {
        if x.data.nrows() != y.data.nrows() {
            return Err(Error::DimensionMismatch { expected: x.data.nrows(), actual: y.data.nrows() });
        }
        let mut t = Self::from_fn(x.n_max(), |j, k, u, tt| x.get(j, u) * y.get(k, tt))?;
        t.captured_weight = x.captured_weight * y.captured_weight;
        Ok(t)
    }

    pub fn n_max(&self) -> ModeIndex {
        self.n_max
    }

    /// Number of orders per index, `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    #[inline]
    fn offset(&self, j: ModeIndex, k: ModeIndex, u: ModeIndex, t: ModeIndex) -> usize {
        let d = self.dim();
        ((j * d + k) * d + u) * d + t
    }

    #[inline]
    pub fn get(&self, j: ModeIndex, k: ModeIndex, u: ModeIndex, t: ModeIndex) -> C64 {
        self.data[self.offset(j, k, u, t)]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn total_weight(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_truncated(&self) -> bool {
        self.captured_weight < TRUNCATION_THRESHOLD
    }

    /// Signal modes `(j, k)` as rows, idler modes `(u, t)` as columns.
    pub fn bipartite_matrix(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d * d, d * d, |r, c| self.get(r / d, r % d, c / d, c % d))
    }

    /// Marginal histogram `Σ_{k,t} |C_{jkut}|²` (axis `X`) or
    /// `Σ_{j,u} |C_{jkut}|²` (axis `Y`).
    pub fn marginal(&self, axis: Axis) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for j in 0..d {
            for k in 0..d {
                for u in 0..d {
                    for t in 0..d {
                        let p = self.get(j, k, u, t).norm_sqr();
                        match axis {
                            Axis::X => out[(j, u)] += p,
                            Axis::Y => out[(k, t)] += p,
                        }
                    }
                }
            }
        }
        out
    }

    /// Amplitude of `|HG_s⟩_s |HG_i⟩_i`.
    pub fn amplitude(&self, signal: ModePair, idler: ModePair) -> C64 {
        if signal.n > self.n_max || signal.m > self.n_max || idler.n > self.n_max || idler.m > self.n_max {
            return C64::new(0.0, 0.0);
        }
        self.get(signal.n, signal.m, idler.n, idler.m)
    }
}

/// `table[(j*d + u)][a*q + b] = HG_j((K+_a + K-_b)/2) HG_u((K+_a - K-_b)/2)`.
struct PairTable {
    d: usize,
    p: usize,
    q: usize,
    values: Vec<f64>,
}

impl PairTable {
    fn new(plus: &QuadratureGrid, minus: &QuadratureGrid, n_max: ModeIndex, sigma: ModeWidth) -> Self {
        let d = n_max + 1;
        let (p, q) = (plus.len(), minus.len());
        let mut values = vec![0.0; d * d * p * q];
        let mut hs = vec![0.0; d];
        let mut hi = vec![0.0; d];
        for a in 0..p {
            for b in 0..q {
                let (kp, km) = (plus.nodes[a], minus.nodes[b]);
                hg_modes(0.5 * (kp + km), sigma, &mut hs);
                hg_modes(0.5 * (kp - km), sigma, &mut hi);
                for j in 0..d {
                    for u in 0..d {
                        values[(j * d + u) * p * q + a * q + b] = hs[j] * hi[u];
                    }
                }
            }
        }
        Self { d, p, q, values }
    }

    #[inline]
    fn row(&self, ju: usize) -> &[f64] {
        let n = self.p * self.q;
        &self.values[ju * n..(ju + 1) * n]
    }
}

fn check_points(points: usize, n_max: ModeIndex, pump_order: ModeIndex) -> Result<()> {
    if points > MAX_POINTS {
        return Err(Error::BudgetExceeded { requested: points, limit: MAX_POINTS });
    }
    // polynomial degree in K+ is at most 2 n_max + pump_order
    if 2 * points < 2 * n_max + pump_order + 1 {
        return Err(Error::InvalidParameter("quadrature grid too small for the truncation"));
    }
    Ok(())
}

fn plus_grid(points: usize, pump: ModeWidth, sigma: ModeWidth) -> Result<QuadratureGrid> {
    let (w, s) = (pump.get(), sigma.get());
    gauss_hermite_grid(points, (0.5 * w * w + 0.25 * s * s).sqrt())
}

fn minus_grid(points: usize, kernel: &PhaseMatchKernel, sigma: ModeWidth) -> Result<QuadratureGrid> {
    let s = sigma.get();
    let d = kernel.delta();
    let scale = match kernel {
        PhaseMatchKernel::Gaussian { .. } => (d * d + 0.25 * s * s).sqrt(),
        // sinc(x) ≈ exp(-x/6) near the origin; the remainder decays slowly,
        // so only a fraction of δ² is folded into the weight
        PhaseMatchKernel::Sinc { .. } => (0.25 * s * s + 0.1 * d * d).sqrt(),
    };
    gauss_hermite_grid(points, scale)
}

/// Per-axis decomposition for a pump of order `pump_order` along this axis
/// and a Gaussian kernel of width `delta`, with [`AXIS_POINTS`] nodes.
pub fn decompose_axis(
    pump_order: ModeIndex,
    delta: f64,
    pump: ModeWidth,
    sigma: ModeWidth,
    n_max: ModeIndex,
) -> Result<AxisCoefficientMatrix> {
    decompose_axis_with(pump_order, delta, pump, sigma, n_max, AXIS_POINTS)
}

pub fn decompose_axis_with(
    pump_order: ModeIndex,
    delta: f64,
    pump: ModeWidth,
    sigma: ModeWidth,
    n_max: ModeIndex,
    points: usize,
) -> Result<AxisCoefficientMatrix> {
    let kernel = PhaseMatchKernel::gaussian(delta)?;
    check_points(points, n_max, pump_order)?;
    let plus = plus_grid(points, pump, sigma)?;
    let minus = minus_grid(points, &kernel, sigma)?;
    let table = PairTable::new(&plus, &minus, n_max, sigma);
    let d = table.d;

    let mut pump_vals = vec![0.0; pump_order + 1];
    let pw: Vec<f64> = plus
        .nodes
        .iter()
        .zip(&plus.measure_weights)
        .map(|(&k, &mw)| {
            hg_modes(k, pump, &mut pump_vals);
            mw * pump_vals[pump_order]
        })
        .collect();
    let kw: Vec<f64> =
        minus.nodes.iter().zip(&minus.measure_weights).map(|(&k, &mw)| mw * (-delta * delta * k * k).exp()).collect();

    let mut raw = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        for u in 0..d {
            let row = table.row(j * d + u);
            let mut acc = 0.0;
            for a in 0..table.p {
                let mut inner = 0.0;
                for b in 0..table.q {
                    inner += row[a * table.q + b] * kw[b];
                }
                acc += pw[a] * inner;
            }
            raw[(j, u)] = 0.5 * acc;
        }
    }

    // ∫∫ |HG_n(K+)|² exp(-2δ²K-²) dK+ dK- / 2
    let full = 0.5 * (PI / (2.0 * delta * delta)).sqrt();
    let captured: f64 = raw.iter().map(|v| v * v).sum::<f64>();
    let norm = captured.sqrt();
    Ok(AxisCoefficientMatrix {
        data: raw.map(|v| C64::new(v / norm, 0.0)),
        pump_order,
        captured_weight: captured / full,
    })
}

/// Full four-index decomposition with [`FULL_POINTS`] nodes per direction.
pub fn decompose_full(
    pump: &PumpSpec,
    kernel: &PhaseMatchKernel,
    sigma: ModeWidth,
    n_max: ModeIndex,
) -> Result<CoefficientTensor> {
    decompose_full_with(pump, kernel, sigma, n_max, FULL_POINTS)
}

/// Full decomposition on a `points⁴` grid, contracted one direction at a
/// time: kernel over `K-_x`, pump over `K+_x`, then the y-axis mode table.
pub fn decompose_full_with(
    pump: &PumpSpec,
    kernel: &PhaseMatchKernel,
    sigma: ModeWidth,
    n_max: ModeIndex,
    points: usize,
) -> Result<CoefficientTensor> {
    check_points(points, n_max, pump.max_order())?;
    let plus = plus_grid(points, pump.width(), sigma)?;
    let minus = minus_grid(points, kernel, sigma)?;
    let table = PairTable::new(&plus, &minus, n_max, sigma);
    let (d, p, q) = (table.d, table.p, table.q);

    let order = pump.max_order();
    let pump_table = hg_table_weighted(&plus, order, pump.width());
    // pump_field[a*p + c] = W_a W_c E_p(K+x_a, K+y_c)
    let mut pump_field = vec![C64::new(0.0, 0.0); p * p];
    for a in 0..p {
        for c in 0..p {
            pump_field[a * p + c] =
                pump.terms().iter().map(|&(m, amp)| amp * (pump_table[a][m.n] * pump_table[c][m.m])).sum();
        }
    }
    // kern[b*q + e] = W_b W_e κ(K-x_b, K-y_e)
    let mut kern = vec![0.0; q * q];
    for b in 0..q {
        for e in 0..q {
            let (kb, ke) = (minus.nodes[b], minus.nodes[e]);
            kern[b * q + e] = minus.measure_weights[b] * minus.measure_weights[e] * kernel.value_sq(kb * kb + ke * ke);
        }
    }

    let mut data = vec![C64::new(0.0, 0.0); d * d * d * d];
    let mut u_buf = vec![0.0; p * q];
    let mut v_buf = vec![C64::new(0.0, 0.0); p * q];
    for j in 0..d {
        for u in 0..d {
            let row = table.row(j * d + u);
            // U(a, e) = Σ_b X_ju(a, b) κ(b, e)
            for a in 0..p {
                for e in 0..q {
                    let mut acc = 0.0;
                    for b in 0..q {
                        acc += row[a * q + b] * kern[b * q + e];
                    }
                    u_buf[a * q + e] = acc;
                }
            }
            // V(c, e) = Σ_a E(a, c) U(a, e)
            for c in 0..p {
                for e in 0..q {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..p {
                        acc += pump_field[a * p + c] * u_buf[a * q + e];
                    }
                    v_buf[c * q + e] = acc;
                }
            }
            for k in 0..d {
                for t in 0..d {
                    let y = table.row(k * d + t);
                    let mut acc = C64::new(0.0, 0.0);
                    for (v, &yv) in v_buf.iter().zip(y) {
                        acc += v * yv;
                    }
                    data[((j * d + k) * d + u) * d + t] = acc * 0.25;
                }
            }
        }
    }

    let full = 0.25 * kernel.plane_norm_sq();
    let captured: f64 = data.iter().map(|c| c.norm_sqr()).sum();
    let norm = captured.sqrt();
    data.iter_mut().for_each(|c| *c /= norm);
    Ok(CoefficientTensor {
        n_max,
        data,
        captured_weight: captured / full,
        pump_width: Some(pump.width()),
        detection_width: Some(sigma),
    })
}

fn hg_table_weighted(grid: &QuadratureGrid, order: ModeIndex, w: ModeWidth) -> Vec<Vec<f64>> {
    grid.nodes
        .iter()
        .zip(&grid.measure_weights)
        .map(|(&k, &mw)| {
            let mut row = vec![0.0; order + 1];
            hg_modes(k, w, &mut row);
            row.iter_mut().for_each(|v| *v *= mw);
            row
        })
        .collect()
}
