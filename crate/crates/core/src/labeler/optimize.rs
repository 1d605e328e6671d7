//! Deterministic limited-memory quasi-Newton ascent using gradients only,
//! with a backtracking Armijo line search.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    pub max_iterations: usize,
    /// Stop once |Δf| / max(|f|, 1) falls below this.
    pub tolerance: f64,
    pub memory: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            max_iterations: 500,
            tolerance: 1e-5,
            memory: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes `f`, which returns (value, gradient).
pub fn maximize<E>(
    mut f: impl FnMut(&[f64]) -> Result<(f64, Vec<f64>), E>,
    x0: Vec<f64>,
    opts: &AscentOptions,
) -> Result<AscentResult, E> {
    let mut x = x0;
    let (mut fx, mut g) = f(&x)?;
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        if dot(&g, &g).sqrt() < 1e-10 {
            converged = true;
            break;
        }
        iterations += 1;
        // two-loop recursion on the ascent direction
        let mut d = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let scale = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= scale);
        } else {
            let n = dot(&g, &g).sqrt();
            d.iter_mut().for_each(|v| *v /= n.max(1.0));
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if slope <= 0.0 {
            hist.clear();
            d.clone_from(&g);
            slope = dot(&g, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let (fn_, gn) = f(&xn)?;
            if fn_.is_finite() && fn_ >= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            converged = true;
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        // curvature pairs for the maximization of f, i.e. minimization of -f
        let y: Vec<f64> = g.iter().zip(&gn).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if hist.len() == opts.memory {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        let rel = (fn_ - fx).abs() / fx.abs().max(1.0);
        x = xn;
        fx = fn_;
        g = gn;
        if rel < opts.tolerance {
            converged = true;
            break;
        }
    }
    Ok(AscentResult {
        x,
        value: fx,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximizes_concave_quadratic() {
        let target = [1.0, -2.0, 3.5];
        let f = |x: &[f64]| -> Result<(f64, Vec<f64>), ()> {
            let v = -x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b) * 2.0).sum::<f64>();
            let g = x.iter().zip(&target).map(|(a, b)| -4.0 * (a - b)).collect();
            Ok((v, g))
        };
        let opts = AscentOptions {
            tolerance: 1e-14,
            ..Default::default()
        };
        let r = maximize(f, vec![0.0; 3], &opts).unwrap();
        for (a, b) in r.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }
}
