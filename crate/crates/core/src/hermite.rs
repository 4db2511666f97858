//! Hermite polynomials and normalized Hermite-Gaussian mode functions in
//! transverse wavenumber space.
//!
//! A mode of order `n` and width parameter `w` is
//!
//! ```text
//! HG_n(k, w) = N_n H_n(w k) exp(-w^2 k^2 / 2),   N_n = (w / (sqrt(pi) 2^n n!))^(1/2)
//! ```
//!
//! so that `∫ |HG_n(k, w)|^2 dk = 1`. Evaluation goes through the
//! orthonormal Hermite-function recurrence, which stays finite for orders
//! and arguments where `H_n` alone would overflow.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Order of a Hermite-Gaussian mode along one transverse axis.
pub type ModeIndex = usize;

/// HG orders along the two transverse axes, `(n, m)` for `HG_nm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModePair {
    pub n: ModeIndex,
    pub m: ModeIndex,
}

impl ModePair {
    pub const fn new(n: ModeIndex, m: ModeIndex) -> Self {
        Self { n, m }
    }
}

impl core::fmt::Display for ModePair {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}{}", self.n, self.m)
    }
}

/// Width parameter `w` of a k-space HG mode, in meters.
///
/// The envelope of the mode amplitude is `exp(-w^2 k^2 / 2)`. A beam with
/// position-space waist `w_p` (amplitude `exp(-x^2 / w_p^2)`) has
/// `w = w_p / sqrt(2)`; see [`ModeWidth::from_waist`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ModeWidth(f64);

impl ModeWidth {
    pub fn new(w: f64) -> Result<Self> {
        if w.is_finite() && w > 0.0 {
            Ok(Self(w))
        } else {
            Err(Error::InvalidParameter("mode width must be positive and finite"))
        }
    }

    /// Width parameter of a beam whose position-space amplitude is
    /// `exp(-x^2 / waist^2)`.
    pub fn from_waist(waist: f64) -> Result<Self> {
        Self::new(waist / core::f64::consts::SQRT_2)
    }

    /// Width `v` of the amplitude envelope written as `exp(-v^2 k^2)`.
    ///
    /// For a pump this is the width that enters `K = (v^2 + δ^2) / (2 v δ)`;
    /// it equals half the position-space waist.
    pub fn from_envelope(v: f64) -> Result<Self> {
        Self::new(v * core::f64::consts::SQRT_2)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn waist(self) -> f64 {
        self.0 * core::f64::consts::SQRT_2
    }

    pub fn envelope(self) -> f64 {
        self.0 / core::f64::consts::SQRT_2
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite_poly(n: ModeIndex, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[0..=nmax]` with orthonormal Hermite functions
/// `ψ_n(x) = H_n(x) exp(-x^2/2) / sqrt(sqrt(pi) 2^n n!)`.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = core::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 2..out.len() {
        let nf = n as f64;
        out[n] = (2.0 / nf).sqrt() * x * out[n - 1] - ((nf - 1.0) / nf).sqrt() * out[n - 2];
    }
}

/// Normalization constant `N_n = (w / (sqrt(pi) 2^n n!))^(1/2)`.
pub fn hg_normalization(n: ModeIndex, w: ModeWidth) -> f64 {
    // log-space keeps 2^n n! finite for large n
    let mut log_fact = 0.0;
    for k in 2..=n {
        log_fact += (k as f64).ln();
    }
    let log_norm = w.get().ln() - 0.5 * PI.ln() - (n as f64) * core::f64::consts::LN_2 - log_fact;
    (0.5 * log_norm).exp()
}

/// Normalized mode value `HG_n(k, w)`.
pub fn hg_mode(n: ModeIndex, k: f64, w: ModeWidth) -> f64 {
    let mut buf = vec![0.0; n + 1];
    hg_modes(k, w, &mut buf);
    buf[n]
}

/// Fills `out[0..=nmax]` with `HG_0(k, w) .. HG_nmax(k, w)`.
pub fn hg_modes(k: f64, w: ModeWidth, out: &mut [f64]) {
    hermite_functions(w.get() * k, out);
    let scale = w.get().sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
}

/// Table `table[i][n] = HG_n(nodes[i], w)` for `n <= nmax`.
pub fn hg_table(nodes: &[f64], nmax: ModeIndex, w: ModeWidth) -> Vec<Vec<f64>> {
    nodes
        .iter()
        .map(|&k| {
            let mut row = vec![0.0; nmax + 1];
            hg_modes(k, w, &mut row);
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_low_orders() {
        assert_eq!(hermite_poly(0, 7.3), 1.0);
        assert_eq!(hermite_poly(1, 2.0), 4.0);
        assert_eq!(hermite_poly(3, 2.0), 40.0);
        let x: f64 = 0.7;
        let h4 = 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
        assert!((hermite_poly(4, x) - h4).abs() < 1e-12);
    }

    #[test]
    fn recurrence_drift_at_order_twelve() {
        for i in -20..=20 {
            let x = i as f64 * 0.5;
            let lhs = hermite_poly(13, x);
            let rhs = 2.0 * x * hermite_poly(12, x) - 24.0 * hermite_poly(11, x);
            let scale = lhs.abs().max(1.0);
            assert!((lhs - rhs).abs() / scale <= 1e-9, "x={x}");
        }
    }

    #[test]
    fn mode_matches_polynomial_form() {
        let w = ModeWidth::new(2.5e-5).unwrap();
        for n in 0..8 {
            for &k in &[-8.0e4, -1.0e4, 0.0, 3.3e4, 6.0e4] {
                let x = w.get() * k;
                let direct = hg_normalization(n, w) * hermite_poly(n, x) * (-0.5 * x * x).exp();
                let via = hg_mode(n, k, w);
                assert!((direct - via).abs() <= 1e-12 * direct.abs().max(hg_mode(0, 0.0, w)));
            }
        }
    }

    #[test]
    fn peak_value_and_odd_zero() {
        let w = ModeWidth::new(3.0e-5).unwrap();
        let peak = (w.get() * w.get() / PI).powf(0.25);
        assert!((hg_mode(0, 0.0, w) - peak).abs() < 1e-12 * peak);
        assert_eq!(hg_mode(1, 0.0, w), 0.0);
        assert_eq!(hg_mode(3, 0.0, w), 0.0);
    }

    #[test]
    fn parity() {
        let w = ModeWidth::new(1.0).unwrap();
        for n in 0..10 {
            for &k in &[0.3, 1.1, 2.7] {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((hg_mode(n, -k, w) - sign * hg_mode(n, k, w)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn width_conventions() {
        let w = ModeWidth::from_waist(30e-6).unwrap();
        assert!((w.waist() - 30e-6).abs() < 1e-18);
        assert!((w.envelope() - 15e-6).abs() < 1e-18);
        assert!(ModeWidth::new(0.0).is_err());
        assert!(ModeWidth::new(f64::NAN).is_err());
        assert!(ModeWidth::new(-1.0).is_err());
    }
}
