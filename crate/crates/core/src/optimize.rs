//! Limited-memory BFGS with a strong-Wolfe line search.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsConfig {
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop when `|f_k - f_{k+1}| <= rel_tol * max(|f_k|, |f_{k+1}|, tiny)`
    /// holds for three consecutive iterations.
    pub rel_tol: f64,
    pub grad_tol: f64,
    /// Stop once the objective drops below this value.
    pub value_floor: f64,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self { memory: 12, max_iterations: 20_000, rel_tol: 1e-10, grad_tol: 1e-8, value_floor: 1e-16 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f`, which writes its gradient into the second argument and
/// returns the value.
pub fn lbfgs(mut f: impl FnMut(&[f64], &mut [f64]) -> f64, x0: &[f64], config: &LbfgsConfig) -> LbfgsResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    let mut evaluations = 1;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(config.memory);
    let mut dir = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut alpha_buf = vec![0.0; config.memory];
    let mut flat_streak = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        let gn = norm(&g);
        if gn <= config.grad_tol || fx <= config.value_floor {
            converged = true;
            break;
        }
        // two-loop recursion
        dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
        for (idx, (s, y, rho)) in history.iter().enumerate().rev() {
            let a = rho * dot(s, &dir);
            alpha_buf[idx] = a;
            dir.iter_mut().zip(y).for_each(|(d, yi)| *d -= a * yi);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            dir.iter_mut().for_each(|d| *d *= gamma);
        } else {
            let scale = 1.0 / gn.max(1e-300);
            dir.iter_mut().for_each(|d| *d *= scale.min(1.0));
        }
        for (idx, (s, y, rho)) in history.iter().enumerate() {
            let b = rho * dot(y, &dir);
            let a = alpha_buf[idx];
            dir.iter_mut().zip(s).for_each(|(d, si)| *d += (a - b) * si);
        }
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            history.clear();
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi / gn);
            slope = dot(&g, &dir);
        }

        let step = line_search(&mut f, &x, fx, slope, &dir, &mut x_new, &mut g_new, &mut evaluations);
        let Some((step, f_new)) = step else {
            if history.is_empty() {
                break;
            }
            history.clear();
            continue;
        };
        iterations += 1;

        let s: Vec<f64> = dir.iter().map(|d| d * step).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if history.len() == config.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }

        let scale = fx.abs().max(f_new.abs()).max(1e-300);
        if (fx - f_new).abs() <= config.rel_tol * scale {
            flat_streak += 1;
        } else {
            flat_streak = 0;
        }
        core::mem::swap(&mut x, &mut x_new);
        core::mem::swap(&mut g, &mut g_new);
        fx = f_new;
        if flat_streak >= 3 {
            converged = true;
            break;
        }
    }
    let grad_norm = norm(&g);
    LbfgsResult { x, value: fx, grad_norm, iterations, evaluations, converged }
}

/// Bracketing and zoom by safeguarded bisection/interpolation.
#[allow(clippy::too_many_arguments)]
fn line_search(
    f: &mut impl FnMut(&[f64], &mut [f64]) -> f64,
    x: &[f64],
    f0: f64,
    slope0: f64,
    dir: &[f64],
    x_new: &mut [f64],
    g_new: &mut [f64],
    evaluations: &mut usize,
) -> Option<(f64, f64)> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let mut eval = |t: f64, x_new: &mut [f64], g_new: &mut [f64]| -> (f64, f64) {
        for ((xn, xi), d) in x_new.iter_mut().zip(x).zip(dir) {
            *xn = xi + t * d;
        }
        *evaluations += 1;
        let v = f(x_new, g_new);
        (v, dot(g_new, dir))
    };

    let mut lo = 0.0;
    let mut f_lo = f0;
    let mut hi = f64::INFINITY;
    let mut t = 1.0;
    for _ in 0..60 {
        let (ft, st) = eval(t, x_new, g_new);
        if !ft.is_finite() || ft > f0 + C1 * t * slope0 || ft >= f_lo && lo > 0.0 {
            hi = t;
        } else if st.abs() <= -C2 * slope0 {
            return Some((t, ft));
        } else if st > 0.0 {
            hi = lo;
            lo = t;
            f_lo = ft;
        } else {
            lo = t;
            f_lo = ft;
        }
        t = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * t };
        if hi.is_finite() && (hi - lo).abs() < 1e-16 * t.max(1.0) {
            break;
        }
    }
    // fall back to the best sufficient-decrease point found
    if lo > 0.0 {
        let (ft, _) = eval(lo, x_new, g_new);
        if ft < f0 {
            return Some((lo, ft));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64], g: &mut [f64]| {
            let (a, b) = (x[0], x[1]);
            g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
            g[1] = 200.0 * (b - a * a);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let r = lbfgs(f, &[-1.2, 1.0], &LbfgsConfig::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r);
    }

    #[test]
    fn quadratic_in_many_dimensions() {
        let n = 200;
        let f = |x: &[f64], g: &mut [f64]| {
            let mut v = 0.0;
            for i in 0..x.len() {
                let c = 1.0 + i as f64;
                g[i] = 2.0 * c * (x[i] - 1.0);
                v += c * (x[i] - 1.0).powi(2);
            }
            v
        };
        let r = lbfgs(f, &vec![0.0; n], &LbfgsConfig::default());
        assert!(r.converged);
        assert!(r.x.iter().all(|v| (v - 1.0).abs() < 1e-6));
    }
}
