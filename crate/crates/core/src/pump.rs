//! Pump synthesis for target two-photon states.
//!
//! An HG10 pump at the single-Schmidt-mode point gives Ψ⁺. The correlated
//! states Φ± come from `a HG00 + sqrt(1 - a²) HG20` pumps and are reached
//! only by post-selection; the overlap of the full state with the target
//! bounds the success probability.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bell::{golden_max, QUBIT_MODES};
use crate::biphoton::{
    decompose_axis, decompose_full, CoefficientTensor, PhaseMatchKernel, PumpSpec, TRUNCATION_THRESHOLD,
};
use crate::hermite::{ModeIndex, ModePair, ModeWidth};
use crate::{Error, Result, C64};

pub use crate::bell::BellState as TargetState;

/// Points of the coarse scan in [`optimize_pump_weight`] over `a ∈ [-1, 1]`.
pub const WEIGHT_GRID_POINTS: usize = 2001;

/// `a HG00 + sqrt(1 - a²) HG20`.
pub fn correlated_pump(a: f64, width: ModeWidth) -> Result<PumpSpec> {
    if !(a.abs() <= 1.0) {
        return Err(Error::InvalidParameter("pump weight must lie in [-1, 1]"));
    }
    let b = (1.0 - a * a).max(0.0).sqrt();
    PumpSpec::new(alloc::vec![(ModePair::new(0, 0), C64::new(a, 0.0)), (ModePair::new(2, 0), C64::new(b, 0.0))], width)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetOverlap {
    /// `|⟨target|Ψ⟩|²` with `Ψ` normalized over the whole amplitude.
    pub fidelity: f64,
    pub success_probability: f64,
    /// Share of the amplitude norm inside the truncation.
    pub captured_weight: f64,
    pub truncated: bool,
}

/// Contributions of each pump mode, so that any superposition of those
/// modes costs only a linear combination.
///
/// Each component is the decomposed tensor of a single-mode pump scaled by
/// `sqrt(captured_weight)`, i.e. measured against the full amplitude norm.
#[derive(Debug, Clone)]
pub struct PumpModeBasis {
    modes: Vec<ModePair>,
    components: Vec<CoefficientTensor>,
}

impl PumpModeBasis {
    /// Decomposes one single-mode pump per entry of `modes`. Gaussian
    /// kernels use the per-axis closed product; sinc kernels the full
    /// four-index quadrature.
    pub fn new(
        modes: &[ModePair],
        width: ModeWidth,
        kernel: &PhaseMatchKernel,
        sigma: ModeWidth,
        n_max: ModeIndex,
    ) -> Result<Self> {
        let mut components = Vec::with_capacity(modes.len());
        for &mode in modes {
            let t = match kernel {
                PhaseMatchKernel::Gaussian { delta } => {
                    let x = decompose_axis(mode.n, *delta, width, sigma, n_max)?;
                    let y = decompose_axis(mode.m, *delta, width, sigma, n_max)?;
                    let mut t = CoefficientTensor::from_axis_product(&x, &y)?;
                    t.pump_width = Some(width);
                    t.detection_width = Some(sigma);
                    t
                }
                PhaseMatchKernel::Sinc { .. } => decompose_full(&PumpSpec::single(mode, width), kernel, sigma, n_max)?,
            };
            components.push(t);
        }
        Ok(Self { modes: modes.to_vec(), components })
    }

    pub fn modes(&self) -> &[ModePair] {
        &self.modes
    }

    fn check(&self, amplitudes: &[C64]) -> Result<()> {
        if amplitudes.len() != self.modes.len() {
            return Err(Error::DimensionMismatch { expected: self.modes.len(), actual: amplitudes.len() });
        }
        Ok(())
    }

    /// `Σ c_i sqrt(captured_i) T_i` evaluated at one signal/idler pair.
    fn amplitude(&self, amplitudes: &[C64], signal: ModePair, idler: ModePair) -> C64 {
        self.components
            .iter()
            .zip(amplitudes)
            .map(|(t, c)| c * t.captured_weight.sqrt() * t.amplitude(signal, idler))
            .sum()
    }

    /// Captured weight of the superposition.
    pub fn captured_weight(&self, amplitudes: &[C64]) -> Result<f64> {
        self.check(amplitudes)?;
        let len = self.components.first().map_or(0, |t| t.as_slice().len());
        let mut total = 0.0;
        for idx in 0..len {
            let v: C64 = self
                .components
                .iter()
                .zip(amplitudes)
                .map(|(t, c)| c * t.captured_weight.sqrt() * t.as_slice()[idx])
                .sum();
            total += v.norm_sqr();
        }
        Ok(total)
    }

    /// Normalized tensor of the superposition.
    pub fn tensor(&self, amplitudes: &[C64]) -> Result<CoefficientTensor> {
        self.check(amplitudes)?;
        let first = self.components.first().ok_or(Error::InvalidParameter("empty pump basis"))?;
        let n_max = first.n_max();
        let mut t = CoefficientTensor::from_fn(n_max, |j, k, u, tt| {
            self.amplitude(amplitudes, ModePair::new(j, k), ModePair::new(u, tt))
        })?;
        t.captured_weight = self.captured_weight(amplitudes)?;
        t.pump_width = first.pump_width;
        t.detection_width = first.detection_width;
        Ok(t)
    }

    /// Overlap of the superposition with a target Bell state.
    pub fn overlap(&self, amplitudes: &[C64], target: TargetState) -> Result<TargetOverlap> {
        self.check(amplitudes)?;
        let ket = target.ket();
        let mut acc = C64::new(0.0, 0.0);
        for (s, &ms) in QUBIT_MODES.iter().enumerate() {
            for (i, &mi) in QUBIT_MODES.iter().enumerate() {
                acc += ket[2 * s + i].conj() * self.amplitude(amplitudes, ms, mi);
            }
        }
        let captured = self.captured_weight(amplitudes)?;
        let fidelity = acc.norm_sqr().clamp(0.0, 1.0);
        Ok(TargetOverlap {
            fidelity,
            success_probability: fidelity,
            captured_weight: captured,
            truncated: captured < TRUNCATION_THRESHOLD,
        })
    }
}

/// Fidelity of the pump's full two-photon state with `target`.
pub fn target_overlap(
    pump: &PumpSpec,
    kernel: &PhaseMatchKernel,
    sigma: ModeWidth,
    target: TargetState,
    n_max: ModeIndex,
) -> Result<TargetOverlap> {
    let modes: Vec<ModePair> = pump.terms().iter().map(|&(m, _)| m).collect();
    let amps: Vec<C64> = pump.terms().iter().map(|&(_, c)| c).collect();
    PumpModeBasis::new(&modes, pump.width(), kernel, sigma, n_max)?.overlap(&amps, target)
}

/// Basis for the correlated pump family.
pub fn correlated_basis(
    width: ModeWidth,
    kernel: &PhaseMatchKernel,
    sigma: ModeWidth,
    n_max: ModeIndex,
) -> Result<PumpModeBasis> {
    PumpModeBasis::new(&[ModePair::new(0, 0), ModePair::new(2, 0)], width, kernel, sigma, n_max)
}

fn correlated_amplitudes(a: f64) -> [C64; 2] {
    [C64::new(a, 0.0), C64::new((1.0 - a * a).max(0.0).sqrt(), 0.0)]
}

/// `(a, F(a))` for each weight.
pub fn overlap_curve(basis: &PumpModeBasis, target: TargetState, weights: &[f64]) -> Result<Vec<(f64, f64)>> {
    weights
        .iter()
        .map(|&a| {
            if !(a.abs() <= 1.0) {
                return Err(Error::InvalidParameter("pump weight must lie in [-1, 1]"));
            }
            Ok((a, basis.overlap(&correlated_amplitudes(a), target)?.fidelity))
        })
        .collect()
}

/// `WEIGHT_GRID_POINTS` evenly spaced weights covering `[-1, 1]`.
pub fn weight_grid() -> Vec<f64> {
    let n = WEIGHT_GRID_POINTS;
    (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpOptimum {
    pub weight: f64,
    pub fidelity: f64,
}

/// Weight `a*` maximizing the overlap with a Φ target: exhaustive scan of
/// the weight grid followed by golden-section refinement around the best
/// point.
pub fn optimize_pump_weight(basis: &PumpModeBasis, target: TargetState) -> Result<PumpOptimum> {
    if !matches!(target, TargetState::PhiPlus | TargetState::PhiMinus) {
        return Err(Error::InvalidParameter("pump weight optimization targets phi+ or phi-"));
    }
    let grid = weight_grid();
    let curve = overlap_curve(basis, target, &grid)?;
    let (best, &(a0, f0)) = curve
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .ok_or(Error::InvalidParameter("empty weight grid"))?;
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let mut f = |a: f64| Ok(basis.overlap(&correlated_amplitudes(a), target)?.fidelity);
    let (a1, f1) = golden_max(&mut f, lo, hi)?;
    Ok(if f1 >= f0 { PumpOptimum { weight: a1, fidelity: f1 } } else { PumpOptimum { weight: a0, fidelity: f0 } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::{matched_detection_width, single_mode_pump_width};

    fn matched() -> (PhaseMatchKernel, ModeWidth, ModeWidth) {
        let delta = 15e-6;
        let kernel = PhaseMatchKernel::gaussian(delta).unwrap();
        let w = single_mode_pump_width(delta).unwrap();
        let sigma = matched_detection_width(w, delta).unwrap();
        (kernel, w, sigma)
    }

    fn analytic(a: f64) -> f64 {
        let v = a + ((1.0 - a * a) / 2.0).sqrt();
        v * v / 2.0
    }

    #[test]
    fn hg10_gives_psi_plus() {
        let (kernel, w, sigma) = matched();
        let pump = PumpSpec::single(ModePair::new(1, 0), w);
        let o = target_overlap(&pump, &kernel, sigma, TargetState::PsiPlus, 6).unwrap();
        assert!((o.fidelity - 1.0).abs() < 1e-9, "{}", o.fidelity);
        assert!(!o.truncated);
        let o = target_overlap(&pump, &kernel, sigma, TargetState::PsiMinus, 6).unwrap();
        assert!(o.fidelity < 1e-9);
    }

    #[test]
    fn correlated_pump_examples() {
        let (_, w, _) = matched();
        let one = correlated_pump(1.0, w).unwrap();
        assert_eq!(one.terms()[1].1, C64::new(0.0, 0.0));
        let zero = correlated_pump(0.0, w).unwrap();
        assert_eq!(zero.terms()[1].1, C64::new(1.0, 0.0));
        assert!(correlated_pump(1.5, w).is_err());
    }

    #[test]
    fn correlated_overlap_closed_form() {
        let (kernel, w, sigma) = matched();
        let basis = correlated_basis(w, &kernel, sigma, 6).unwrap();
        for a in [-1.0, -0.5, 0.0, 0.3, 0.895, 1.0] {
            let f = basis.overlap(&correlated_amplitudes(a), TargetState::PhiPlus).unwrap().fidelity;
            assert!((f - analytic(a)).abs() < 1e-10, "a = {a}: {f}");
        }
        let f = basis.overlap(&correlated_amplitudes(0.895), TargetState::PhiPlus).unwrap().fidelity;
        assert!((f - 0.7326).abs() < 1e-4);
        let direct =
            target_overlap(&correlated_pump(0.895, w).unwrap(), &kernel, sigma, TargetState::PhiPlus, 6).unwrap();
        assert!((direct.fidelity - f).abs() < 1e-12);
    }

    #[test]
    fn sign_symmetry() {
        let (kernel, w, sigma) = matched();
        let basis = correlated_basis(w, &kernel, sigma, 6).unwrap();
        let plus = basis.overlap(&correlated_amplitudes(0.895), TargetState::PhiPlus).unwrap();
        let minus = basis.overlap(&correlated_amplitudes(-0.895), TargetState::PhiMinus).unwrap();
        assert!((plus.fidelity - minus.fidelity).abs() < 1e-12);
        let p = optimize_pump_weight(&basis, TargetState::PhiPlus).unwrap();
        let m = optimize_pump_weight(&basis, TargetState::PhiMinus).unwrap();
        assert!((p.weight + m.weight).abs() < 1e-3);
        assert!(p.fidelity >= 0.67);
        assert!((p.weight - (2.0f64 / 3.0).sqrt()).abs() < 1e-6);
        assert!((p.fidelity - 0.75).abs() < 1e-10);
        assert!(optimize_pump_weight(&basis, TargetState::PsiPlus).is_err());
    }

    #[test]
    fn global_phase_invariance() {
        let (kernel, w, sigma) = matched();
        let pump = correlated_pump(0.6, w).unwrap();
        let base = target_overlap(&pump, &kernel, sigma, TargetState::PhiPlus, 6).unwrap().fidelity;
        let rotated = pump.with_global_phase(C64::from_polar(1.0, 1.1)).unwrap();
        let f = target_overlap(&rotated, &kernel, sigma, TargetState::PhiPlus, 6).unwrap().fidelity;
        assert!((f - base).abs() < 1e-12);
    }

    #[test]
    fn even_pumps_never_reach_psi() {
        let (kernel, w, sigma) = matched();
        let basis = PumpModeBasis::new(
            &[ModePair::new(0, 0), ModePair::new(2, 0), ModePair::new(4, 1)],
            ModeWidth::new(w.get() * 1.3).unwrap(),
            &kernel,
            sigma,
            6,
        )
        .unwrap();
        let amps = [C64::new(0.5, 0.1), C64::new(-0.3, 0.6), C64::new(0.2, -0.4)];
        let t = basis.tensor(&amps).unwrap();
        let (g, h) = (ModePair::new(0, 0), ModePair::new(1, 0));
        assert!(t.amplitude(g, h).norm() < 1e-10);
        assert!(t.amplitude(h, g).norm() < 1e-10);
        for target in [TargetState::PsiPlus, TargetState::PsiMinus] {
            assert!(basis.overlap(&amps, target).unwrap().fidelity < 1e-20);
        }
    }
}
