//! The {HG00, HG10} qubit subspace of each photon: Bell states, `|θ⟩`
//! projections, coincidence fringes and the CHSH parameter.
//!
//! Two-qubit index order is `2 s + i` with `0 = HG00` and `1 = HG10`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::biphoton::CoefficientTensor;
use crate::hermite::ModePair;
use crate::{Error, Result, C64};

/// Single-photon basis of the qubit subspace.
pub const QUBIT_MODES: [ModePair; 2] = [ModePair::new(0, 0), ModePair::new(1, 0)];

/// Grid step of the coarse CHSH settings search.
pub const CHSH_GRID_STEP: f64 = PI / 60.0;

/// Weight below which a projection onto the subspace is rejected.
pub const MIN_SUBSPACE_WEIGHT: f64 = 1e-6;

/// The four ideal Bell states over `{HG00, HG10}⊗²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [Self::PsiPlus, Self::PsiMinus, Self::PhiPlus, Self::PhiMinus];

    pub fn ket(self) -> Vector4<C64> {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        match self {
            Self::PsiPlus => Vector4::new(z, r, r, z),
            Self::PsiMinus => Vector4::new(z, r, -r, z),
            Self::PhiPlus => Vector4::new(r, z, z, r),
            Self::PhiMinus => Vector4::new(r, z, z, -r),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PsiPlus => "psi+",
            Self::PsiMinus => "psi-",
            Self::PhiPlus => "phi+",
            Self::PhiMinus => "phi-",
        }
    }
}

/// Two-photon state restricted to the qubit subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSubspaceState {
    pub rho: Matrix4<C64>,
    /// Norm² of the full state inside the subspace before renormalization.
    pub in_subspace_weight: f64,
}

impl QubitSubspaceState {
    pub fn from_ket(ket: Vector4<C64>) -> Result<Self> {
        let n = ket.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter("state vector vanishes"));
        }
        let k = ket / C64::new(n, 0.0);
        Ok(Self { rho: k * k.adjoint(), in_subspace_weight: 1.0 })
    }

    pub fn bell(state: BellState) -> Self {
        let k = state.ket();
        Self { rho: k * k.adjoint(), in_subspace_weight: 1.0 }
    }

    /// Product state `|a⟩|b⟩` of basis kets.
    pub fn product(signal: Vector2<C64>, idler: Vector2<C64>) -> Result<Self> {
        Self::from_ket(Vector4::new(
            signal[0] * idler[0],
            signal[0] * idler[1],
            signal[1] * idler[0],
            signal[1] * idler[1],
        ))
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }
}

/// Restriction of a full coefficient tensor to `{HG00, HG10}⊗²`.
pub fn project_to_qubit(tensor: &CoefficientTensor) -> Result<QubitSubspaceState> {
    let mut ket = Vector4::zeros();
    for (s, &ms) in QUBIT_MODES.iter().enumerate() {
        for (i, &mi) in QUBIT_MODES.iter().enumerate() {
            ket[2 * s + i] = tensor.amplitude(ms, mi);
        }
    }
    let weight = ket.norm_squared() / tensor.total_weight();
    if weight < MIN_SUBSPACE_WEIGHT {
        return Err(Error::DegenerateSubspace { weight });
    }
    let mut state = QubitSubspaceState::from_ket(ket)?;
    state.in_subspace_weight = weight;
    Ok(state)
}

/// Orientation angle of a `|θ⟩` projection, kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeasurementSetting(f64);

impl MeasurementSetting {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter("measurement angle must be finite"));
        }
        let r = theta % TAU;
        let t = if r < 0.0 { r + TAU } else { r };
        Ok(Self(if t >= TAU { 0.0 } else { t }))
    }

    pub fn theta(self) -> f64 {
        self.0
    }
}

/// `|θ⟩ = cos(θ/2) |HG00⟩ + sin(θ/2) |HG10⟩`.
pub fn measurement_state(theta: f64) -> Vector2<C64> {
    let h = 0.5 * theta;
    Vector2::new(C64::new(h.cos(), 0.0), C64::new(h.sin(), 0.0))
}

/// Born probability `⟨θs, θi| ρ |θs, θi⟩`.
pub fn coincidence_rate(state: &QubitSubspaceState, theta_s: f64, theta_i: f64) -> f64 {
    let s = measurement_state(theta_s);
    let i = measurement_state(theta_i);
    let v = Vector4::new(s[0] * i[0], s[0] * i[1], s[1] * i[0], s[1] * i[1]);
    (v.adjoint() * state.rho * v)[(0, 0)].re.clamp(0.0, 1.0)
}

/// Correlation from the four rates at `θ` and `θ + π` in each arm.
pub fn correlation(state: &QubitSubspaceState, theta_s: f64, theta_i: f64) -> Result<f64> {
    let r = |a: f64, b: f64| coincidence_rate(state, a, b);
    let pp = r(theta_s, theta_i);
    let mm = r(theta_s + PI, theta_i + PI);
    let pm = r(theta_s, theta_i + PI);
    let mp = r(theta_s + PI, theta_i);
    let total = pp + mm + pm + mp;
    if total <= 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((pp + mm - pm - mp) / total)
}

/// CHSH value and the correlations it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub s: f64,
    /// `(a, a', b, b')`.
    pub settings: [f64; 4],
    /// `E(a,b), E(a,b'), E(a',b), E(a',b')`.
    pub correlations: [f64; 4],
}

/// `S = E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
pub fn chsh(state: &QubitSubspaceState, a: f64, a2: f64, b: f64, b2: f64) -> Result<ChshResult> {
    let e = [
        correlation(state, a, b)?,
        correlation(state, a, b2)?,
        correlation(state, a2, b)?,
        correlation(state, a2, b2)?,
    ];
    Ok(ChshResult { s: e[0] - e[1] + e[2] + e[3], settings: [a, a2, b, b2], correlations: e })
}

/// Settings maximizing `|S|`: a `π/60` grid over `(a, a')`, with `b` and
/// `b'` maximized independently on the same grid (they enter `S`
/// separably), then cyclic golden-section refinement of each angle.
pub fn optimize_chsh(state: &QubitSubspaceState) -> Result<ChshResult> {
    let steps = (TAU / CHSH_GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..steps).map(|i| i as f64 * CHSH_GRID_STEP).collect();
    let mut table = Vec::with_capacity(steps * steps);
    for &x in &grid {
        for &y in &grid {
            table.push(correlation(state, x, y)?);
        }
    }
    let e = |i: usize, j: usize| table[i * steps + j];

    let mut best = (f64::NEG_INFINITY, 1.0, [0usize; 4]);
    for sign in [1.0, -1.0] {
        for ia in 0..steps {
            for ia2 in 0..steps {
                let (mut bb, mut ib) = (f64::NEG_INFINITY, 0);
                let (mut bb2, mut ib2) = (f64::NEG_INFINITY, 0);
                for j in 0..steps {
                    let v = sign * (e(ia, j) + e(ia2, j));
                    if v > bb {
                        bb = v;
                        ib = j;
                    }
                    let v2 = sign * (e(ia2, j) - e(ia, j));
                    if v2 > bb2 {
                        bb2 = v2;
                        ib2 = j;
                    }
                }
                if bb + bb2 > best.0 {
                    best = (bb + bb2, sign, [ia, ia2, ib, ib2]);
                }
            }
        }
    }

    let sign = best.1;
    let mut angles = best.2.map(|i| grid[i]);
    let objective = |x: &[f64; 4]| -> Result<f64> { Ok(sign * chsh(state, x[0], x[1], x[2], x[3])?.s) };
    let mut current = objective(&angles)?;
    for _ in 0..50 {
        let before = current;
        for idx in 0..4 {
            let centre = angles[idx];
            let mut f = |t: f64| {
                let mut x = angles;
                x[idx] = t;
                objective(&x)
            };
            let (t, v) = golden_max(&mut f, centre - CHSH_GRID_STEP, centre + CHSH_GRID_STEP)?;
            if v > current {
                angles[idx] = t;
                current = v;
            }
        }
        if current - before < 1e-15 {
            break;
        }
    }
    chsh(state, angles[0], angles[1], angles[2], angles[3])
}

pub(crate) fn golden_max(f: &mut impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok((t, f(t)?))
}

/// Photon arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Signal,
    Idler,
}

/// A mirror in one arm: `|HG10⟩ → -|HG10⟩`, Gaussian mode unchanged.
pub fn apply_mirror(state: &QubitSubspaceState, arm: Arm) -> QubitSubspaceState {
    let one = C64::new(1.0, 0.0);
    let flip = Matrix2::new(one, C64::new(0.0, 0.0), C64::new(0.0, 0.0), -one);
    let id = Matrix2::identity();
    let (a, b) = match arm {
        Arm::Signal => (flip, id),
        Arm::Idler => (id, flip),
    };
    let u = a.kronecker(&b);
    QubitSubspaceState { rho: u * state.rho * u.adjoint(), in_subspace_weight: state.in_subspace_weight }
}

/// `R(θs)` over `thetas` at fixed idler angle.
pub fn coincidence_curve(state: &QubitSubspaceState, theta_i: f64, thetas: &[f64]) -> Vec<f64> {
    thetas.iter().map(|&t| coincidence_rate(state, t, theta_i)).collect()
}

/// Poisson counts with mean `pairs · R(θs, θi)` for each setting pair.
pub fn sample_counts(state: &QubitSubspaceState, settings: &[(f64, f64)], pairs: f64, seed: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    settings
        .iter()
        .map(|&(s, i)| {
            let mean = pairs * coincidence_rate(state, s, i);
            if mean <= 0.0 {
                return Ok(0);
            }
            let dist = Poisson::new(mean).map_err(|_| Error::InvalidParameter("invalid Poisson mean"))?;
            Ok(dist.sample(&mut rng) as u64)
        })
        .collect()
}

/// Correlation estimated from sampled counts at the four angle pairs.
pub fn sampled_correlation(
    state: &QubitSubspaceState,
    theta_s: f64,
    theta_i: f64,
    pairs: f64,
    seed: u64,
) -> Result<f64> {
    let c = sample_counts(
        state,
        &[(theta_s, theta_i), (theta_s + PI, theta_i + PI), (theta_s, theta_i + PI), (theta_s + PI, theta_i)],
        pairs,
        seed,
    )?;
    let total = (c[0] + c[1] + c[2] + c[3]) as f64;
    if total == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((c[0] as f64 + c[1] as f64 - c[2] as f64 - c[3] as f64) / total)
}
