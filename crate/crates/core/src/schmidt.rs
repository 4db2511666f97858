//! Schmidt spectra and Schmidt numbers of biphoton states.
//!
//! Widths passed to the closed forms are envelope widths: the pump and the
//! phase matching are `exp(-w² q²)` and `exp(-δ² Δk²)`. For a pump of
//! position-space waist `w_p` that is `w = w_p / 2`, see
//! [`ModeWidth::envelope`].

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::biphoton::{
    decompose_axis, decompose_full, matched_detection_width, Axis, AxisCoefficientMatrix, CoefficientTensor,
    PhaseMatchKernel, PumpSpec,
};
use crate::hermite::{ModeIndex, ModePair, ModeWidth};
use crate::linalg::singular_values;
use crate::{Error, Result, C64};

/// Eigenvalues below this are treated as round-off and clipped to zero.
pub const CLIP_THRESHOLD: f64 = 1e-12;

/// Default modification factors of the closed form.
pub const DEFAULT_ALPHA: f64 = 0.85;
pub const DEFAULT_BETA: f64 = 1.65;

/// Non-increasing Schmidt eigenvalues summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    eigenvalues: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Sorts, clips values below [`CLIP_THRESHOLD`] and normalizes.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        weights.iter_mut().for_each(|v| {
            if *v < CLIP_THRESHOLD {
                *v = 0.0;
            }
        });
        weights.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter("Schmidt weights vanish"));
        }
        weights.iter_mut().for_each(|v| *v /= total);
        Ok(Self { eigenvalues: weights })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// How a Schmidt number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KMethod {
    Svd,
    ClosedForm,
    Modified,
    DiagonalEstimate,
}

impl KMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Svd => "svd",
            Self::ClosedForm => "closed_form",
            Self::Modified => "modified",
            Self::DiagonalEstimate => "diagonal_estimate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KEstimate {
    pub k: f64,
    pub method: KMethod,
}

/// States that can be split into signal rows and idler columns.
pub trait Bipartite {
    fn bipartite_matrix(&self) -> DMatrix<C64>;
}

impl Bipartite for CoefficientTensor {
    fn bipartite_matrix(&self) -> DMatrix<C64> {
        CoefficientTensor::bipartite_matrix(self)
    }
}

impl Bipartite for AxisCoefficientMatrix {
    fn bipartite_matrix(&self) -> DMatrix<C64> {
        self.data.clone()
    }
}

/// Squared singular values of the signal-by-idler amplitude matrix.
pub fn schmidt_decompose(state: &impl Bipartite) -> Result<SchmidtSpectrum> {
    let s = singular_values(&state.bipartite_matrix());
    SchmidtSpectrum::from_weights(s.iter().map(|v| v * v).collect())
}

/// `K = 1 / Σ λ²`.
pub fn schmidt_number(spectrum: &SchmidtSpectrum) -> KEstimate {
    let purity: f64 = spectrum.eigenvalues.iter().map(|l| l * l).sum();
    KEstimate { k: 1.0 / purity, method: KMethod::Svd }
}

/// Per-axis closed form `K_x = (w² + δ²) / (2 w δ)`.
pub fn k_axis_closed_form(w: f64, delta: f64) -> f64 {
    (w * w + delta * delta) / (2.0 * w * delta)
}

/// Total closed-form Schmidt number `K = K_x K_y = K_x²`.
pub fn k_closed_form(w: f64, delta: f64) -> Result<KEstimate> {
    check_positive(&[w, delta])?;
    let kx = k_axis_closed_form(w, delta);
    Ok(KEstimate { k: kx * kx, method: KMethod::ClosedForm })
}

/// `K = β ((w² + α²δ²) / (2 w α δ))²`.
pub fn k_modified(w: f64, delta: f64, alpha: f64, beta: f64) -> Result<KEstimate> {
    check_positive(&[w, delta, alpha, beta])?;
    let kx = k_axis_closed_form(w, alpha * delta);
    Ok(KEstimate { k: beta * kx * kx, method: KMethod::Modified })
}

fn check_positive(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("widths and modification factors must be positive"))
    }
}

/// Schmidt number from the diagonal only: `λ̂_a = |C_aa|² / Σ_b |C_bb|²`.
pub fn estimate_k_from_diagonal(matrix: &AxisCoefficientMatrix) -> Result<KEstimate> {
    let diag: Vec<f64> = (0..matrix.data.nrows()).map(|a| matrix.get(a, a).norm_sqr()).collect();
    let total: f64 = diag.iter().sum();
    if diag.iter().all(|&v| v < 1e-14) {
        return Err(Error::DegenerateDiagonal);
    }
    let sum_sq: f64 = diag.iter().map(|v| (v / total) * (v / total)).sum();
    Ok(KEstimate { k: 1.0 / sum_sq, method: KMethod::DiagonalEstimate })
}

/// Detection width used along a Schmidt-number curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detection {
    /// Re-matched to every pump width.
    Matched,
    Fixed(ModeWidth),
}

/// One row of a Schmidt-number curve.
#[derive(Debug, Clone, PartialEq)]
pub struct KCurveRow {
    /// Position-space pump waist in meters.
    pub waist: f64,
    /// One value per requested method, in request order.
    pub k: Vec<f64>,
    /// Captured weight of the decomposition, when one was needed.
    pub captured_weight: Option<f64>,
}

/// Options for [`k_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCurveOptions {
    pub detection: Detection,
    pub n_max: ModeIndex,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for KCurveOptions {
    fn default() -> Self {
        Self {
            detection: Detection::Matched,
            n_max: crate::biphoton::DEFAULT_N_MAX,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }
}

/// Schmidt number against pump waist for each method.
///
/// `Svd` and `DiagonalEstimate` decompose a Gaussian pump of that waist:
/// per axis for a Gaussian kernel (total `K = K_x²`), on the full tensor for
/// a sinc kernel (diagonal estimate from the `k = t = 0` and `j = u = 0`
/// slices).
pub fn k_curve(
    waists: &[f64],
    kernel: &PhaseMatchKernel,
    methods: &[KMethod],
    options: &KCurveOptions,
) -> Result<Vec<KCurveRow>> {
    if waists.is_empty() {
        return Err(Error::InvalidParameter("curve needs at least one waist"));
    }
    let delta = kernel.delta();
    let needs_decomposition = methods.iter().any(|m| matches!(m, KMethod::Svd | KMethod::DiagonalEstimate));
    let mut rows = Vec::with_capacity(waists.len());
    for &waist in waists {
        let pump = ModeWidth::from_waist(waist)?;
        let sigma = match options.detection {
            Detection::Matched => matched_detection_width(pump, delta)?,
            Detection::Fixed(s) => s,
        };
        let (svd, diag, captured) = if needs_decomposition {
            decomposed_k(kernel, pump, sigma, options.n_max)?
        } else {
            (f64::NAN, f64::NAN, None)
        };
        let k = methods
            .iter()
            .map(|m| {
                Ok(match m {
                    KMethod::ClosedForm => k_closed_form(pump.envelope(), delta)?.k,
                    KMethod::Modified => k_modified(pump.envelope(), delta, options.alpha, options.beta)?.k,
                    KMethod::Svd => svd,
                    KMethod::DiagonalEstimate => diag,
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(KCurveRow { waist, k, captured_weight: captured });
    }
    Ok(rows)
}

fn decomposed_k(
    kernel: &PhaseMatchKernel,
    pump: ModeWidth,
    sigma: ModeWidth,
    n_max: ModeIndex,
) -> Result<(f64, f64, Option<f64>)> {
    match kernel {
        PhaseMatchKernel::Gaussian { delta } => {
            let axis = decompose_axis(0, *delta, pump, sigma, n_max)?;
            let kx = schmidt_number(&schmidt_decompose(&axis)?).k;
            let kd = estimate_k_from_diagonal(&axis)?.k;
            Ok((kx * kx, kd * kd, Some(axis.captured_weight * axis.captured_weight)))
        }
        PhaseMatchKernel::Sinc { .. } => {
            let tensor = decompose_full(&PumpSpec::single(ModePair::new(0, 0), pump), kernel, sigma, n_max)?;
            let k = schmidt_number(&schmidt_decompose(&tensor)?).k;
            let kx = estimate_k_from_diagonal(&AxisCoefficientMatrix::slice(&tensor, Axis::X, (0, 0))?)?.k;
            let ky = estimate_k_from_diagonal(&AxisCoefficientMatrix::slice(&tensor, Axis::Y, (0, 0))?)?.k;
            Ok((k, kx * ky, Some(tensor.captured_weight)))
        }
    }
}

/// Location and value of the minimum of the modified closed form over
/// pump waist: `w_p = 2 α δ`, `K = β`.
pub fn modified_minimum(delta: f64, alpha: f64, beta: f64) -> (f64, f64) {
    (2.0 * alpha * delta, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::single_mode_pump_width;

    #[test]
    fn trivial_spectra() {
        let prod =
            CoefficientTensor::from_fn(2, |j, k, u, t| C64::new(if j + k + u + t == 0 { 1.0 } else { 0.0 }, 0.0))
                .unwrap();
        let s = schmidt_decompose(&prod).unwrap();
        assert_eq!(s.eigenvalues()[0], 1.0);
        assert!((schmidt_number(&s).k - 1.0).abs() < 1e-12);

        let bell = CoefficientTensor::from_fn(2, |j, k, u, t| {
            let on = (j, k, u, t) == (0, 0, 1, 0) || (j, k, u, t) == (1, 0, 0, 0);
            C64::new(if on { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let s = schmidt_decompose(&bell).unwrap();
        assert!((s.eigenvalues()[0] - 0.5).abs() < 1e-12 && (s.eigenvalues()[1] - 0.5).abs() < 1e-12);
        assert!((schmidt_number(&s).k - 2.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_spectrum_at_three_delta() {
        let delta = 15e-6;
        let w = 3.0 * delta;
        let pump = ModeWidth::from_envelope(w).unwrap();
        let sigma = matched_detection_width(pump, delta).unwrap();
        let axis = decompose_axis(0, delta, pump, sigma, 20).unwrap();
        let s = schmidt_decompose(&axis).unwrap();
        let mu = ((w - delta) / (w + delta)).powi(2);
        for (a, &l) in s.eigenvalues().iter().take(6).enumerate() {
            let expect = (1.0 - mu) * mu.powi(a as i32);
            assert!((l - expect).abs() < 1e-9, "a={a}: {l} vs {expect}");
        }
        let kx = schmidt_number(&s).k;
        assert!((kx - 5.0 / 3.0).abs() < 1e-6);
        assert!((k_closed_form(w, delta).unwrap().k - 25.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_properties() {
        let d = 2.0;
        assert!((k_closed_form(d, d).unwrap().k - 1.0).abs() < 1e-15);
        assert!((k_closed_form(3.0, 1.3).unwrap().k - k_closed_form(1.3, 3.0).unwrap().k).abs() < 1e-12);
        let m = k_modified(DEFAULT_ALPHA * d, d, DEFAULT_ALPHA, DEFAULT_BETA).unwrap();
        assert!((m.k - 1.65).abs() < 1e-12);
        assert!((k_modified(2.7, d, 1.0, 1.0).unwrap().k - k_closed_form(2.7, d).unwrap().k).abs() < 1e-12);
        assert!(k_closed_form(0.0, 1.0).is_err());
    }

    #[test]
    fn diagonal_estimator() {
        let delta = 15e-6;
        let pump = ModeWidth::from_envelope(1.7 * delta).unwrap();
        let sigma = matched_detection_width(pump, delta).unwrap();
        let axis = decompose_axis(0, delta, pump, sigma, 12).unwrap();
        let svd = schmidt_number(&schmidt_decompose(&axis).unwrap()).k;
        let est = estimate_k_from_diagonal(&axis).unwrap().k;
        assert!((svd - est).abs() < 1e-9);

        let zero_diag = AxisCoefficientMatrix {
            data: DMatrix::from_fn(2, 2, |r, c| C64::new(if r != c { 0.5f64.sqrt() } else { 0.0 }, 0.0)),
            pump_order: 1,
            captured_weight: 1.0,
        };
        assert_eq!(estimate_k_from_diagonal(&zero_diag), Err(Error::DegenerateDiagonal));
    }

    #[test]
    fn curve_single_point() {
        let delta = 15e-6;
        let kernel = PhaseMatchKernel::gaussian(delta).unwrap();
        let waist = single_mode_pump_width(delta).unwrap().waist();
        let rows = k_curve(&[waist], &kernel, &[KMethod::ClosedForm, KMethod::Svd], &KCurveOptions::default()).unwrap();
        assert!((rows[0].waist - 2.0 * delta).abs() < 1e-18);
        assert!((rows[0].k[0] - 1.0).abs() < 1e-12);
        assert!((rows[0].k[1] - 1.0).abs() < 1e-9);
        assert!(k_curve(&[], &kernel, &[KMethod::ClosedForm], &KCurveOptions::default()).is_err());
    }
}
