//! Brute-force reference integrals shared by the integration and acceptance
//! targets. Nothing here calls the library's quadrature or mode functions.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Normalized HG mode `sqrt(w) ψ_n(w k)` from the explicit Hermite
/// polynomial and factorial normalization.
pub fn mode(n: usize, k: f64, w: f64) -> f64 {
    let x = w * k;
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    let h = match n {
        0 => h0,
        1 => h1,
        _ => {
            for m in 1..n {
                let h2 = 2.0 * x * h1 - 2.0 * m as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    };
    let fact: f64 = (1..=n).map(|v| v as f64).product();
    let norm = (w / (2f64.powi(n as i32) * fact * PI.sqrt())).sqrt();
    norm * h * (-0.5 * x * x).exp()
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

pub enum OracleKernel {
    /// `sinc(δ² |Δk|²)`.
    Sinc(f64),
    /// `exp(-δ² |Δk|²)`.
    Gaussian(f64),
}

impl OracleKernel {
    fn value(&self, r2: f64) -> f64 {
        match *self {
            Self::Sinc(d) => {
                let x = d * d * r2;
                if x.abs() < 1e-8 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
            Self::Gaussian(d) => (-d * d * r2).exp(),
        }
    }
}

/// Real coefficients `C[((j d + k) d + u) d + t]` of a single-mode pump
/// `HG_{px, py}` (mode width `w`), normalized to unit sum of squares, with
/// detection mode width `sigma`.
///
/// Integrates over `K± = k_s ± k_i`: trapezoid on a uniform `K+` grid per
/// axis, and polar coordinates for `K-` (composite Gauss-Legendre in the
/// radius, trapezoid in the angle).
pub fn reference_tensor(pump: (usize, usize), w: f64, kernel: &OracleKernel, sigma: f64, n_max: usize) -> Vec<f64> {
    let d = n_max + 1;
    let s_plus = (0.5 * w * w + 0.25 * sigma * sigma).sqrt();
    let plus_points = 161;
    let r_plus = 12.0 / s_plus;
    let dk = 2.0 * r_plus / (plus_points - 1) as f64;
    let plus: Vec<f64> = (0..plus_points).map(|i| -r_plus + i as f64 * dk).collect();

    let r_max = 28.0 / sigma;
    let panels = 64;
    let (gx, gw) = gauss_legendre(8);
    let mut radii = Vec::new();
    let h = r_max / panels as f64;
    for p in 0..panels {
        for (x, wt) in gx.iter().zip(&gw) {
            radii.push((h * (p as f64 + 0.5 * (x + 1.0)), 0.5 * h * wt));
        }
    }
    let angles = 64;

    let axis = |order: usize, km: f64| -> Vec<f64> {
        let mut out = vec![0.0; d * d];
        for &kp in &plus {
            let e = mode(order, kp, w) * dk;
            let hs: Vec<f64> = (0..d).map(|j| mode(j, 0.5 * (kp + km), sigma)).collect();
            let hi: Vec<f64> = (0..d).map(|u| mode(u, 0.5 * (kp - km), sigma)).collect();
            for j in 0..d {
                for u in 0..d {
                    out[j * d + u] += e * hs[j] * hi[u];
                }
            }
        }
        out
    };

    let mut c = vec![0.0; d * d * d * d];
    for &(r, wr) in &radii {
        let kv = kernel.value(r * r) * r * wr * (2.0 * PI / angles as f64);
        for a in 0..angles {
            let phi = 2.0 * PI * a as f64 / angles as f64;
            let ax = axis(pump.0, r * phi.cos());
            let ay = axis(pump.1, r * phi.sin());
            for j in 0..d {
                for u in 0..d {
                    let x = kv * ax[j * d + u];
                    for k in 0..d {
                        for t in 0..d {
                            c[((j * d + k) * d + u) * d + t] += x * ay[k * d + t];
                        }
                    }
                }
            }
        }
    }
    let norm: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    c.iter_mut().for_each(|v| *v /= norm);
    c
}

/// Share of `Σ|C|²` outside the x-axis selection rule `j + u = order`.
pub fn off_rule_mass(c: &[f64], n_max: usize, order: usize) -> f64 {
    let d = n_max + 1;
    let mut off = 0.0;
    let mut total = 0.0;
    for j in 0..d {
        for k in 0..d {
            for u in 0..d {
                for t in 0..d {
                    let p = c[((j * d + k) * d + u) * d + t].powi(2);
                    total += p;
                    if j + u != order {
                        off += p;
                    }
                }
            }
        }
    }
    off / total
}
