//! Gauss-Hermite quadrature grids.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const MAX_NEWTON: usize = 100;

/// Gauss-Hermite rule mapped onto wavenumbers `k = x / scale`.
///
/// `weights` integrate against the Gaussian measure,
/// `∫ f(k) exp(-(scale k)^2) dk ≈ Σ weights[i] f(nodes[i])`, while
/// `measure_weights` integrate plain functions, `∫ f(k) dk ≈ Σ
/// measure_weights[i] f(nodes[i])`. The second form is exact when `f` is a
/// polynomial of degree `< 2 points` times `exp(-(scale k)^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub measure_weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ weights[i] f(nodes[i])`.
    pub fn integrate_weighted(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&k, &w)| w * f(k)).sum()
    }

    /// `Σ measure_weights[i] f(nodes[i])`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.measure_weights).map(|(&k, &w)| w * f(k)).sum()
    }
}

/// Gauss-Hermite nodes and weights for `points` nodes, rescaled by `scale`.
pub fn gauss_hermite_grid(points: usize, scale: f64) -> Result<QuadratureGrid> {
    if points < 2 {
        return Err(Error::InvalidParameter("Gauss-Hermite rule needs at least 2 points"));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter("quadrature scale must be positive"));
    }
    let n = points;
    let half = n.div_ceil(2);
    let mut roots = vec![0.0; half];
    let mut measure = vec![0.0; half];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..half {
        // standard asymptotic starting guesses, largest root first
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        let mut converged = false;
        let mut psi_prev = 0.0;
        for _ in 0..MAX_NEWTON {
            let (psi_n, psi_nm1) = hermite_function_pair(n, z);
            let deriv = (2.0 * nf).sqrt() * psi_nm1 - z * psi_n;
            let step = psi_n / deriv;
            z -= step;
            psi_prev = psi_nm1;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                psi_prev = hermite_function_pair(n, z).1;
                break;
            }
        }
        if !converged || !z.is_finite() {
            return Err(Error::QuadratureNoConvergence { index: i, points: n });
        }
        roots[i] = z;
        measure[i] = 1.0 / (nf * psi_prev * psi_prev);
    }

    // roots[i] > 0 for i < n/2; the middle root of an odd rule is zero
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    for (i, (&r, &m)) in roots.iter().zip(&measure).enumerate() {
        if n % 2 == 1 && i == half - 1 {
            pairs.push((0.0, m));
        } else {
            pairs.push((-r, m));
            pairs.push((r, m));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ms: Vec<f64> = pairs.iter().map(|p| p.1).collect();

    let weights = xs.iter().zip(&ms).map(|(&x, &m)| m * (-x * x).exp() / scale).collect();
    let measure_weights = ms.iter().map(|&m| m / scale).collect();
    Ok(QuadratureGrid { nodes: xs.iter().map(|&x| x / scale).collect(), weights, measure_weights })
}

/// `(ψ_n(x), ψ_{n-1}(x))` for the orthonormal Hermite functions.
fn hermite_function_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for j in 1..=n {
        let jf = j as f64;
        let next = (2.0 / jf).sqrt() * x * cur - ((jf - 1.0) / jf).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}
