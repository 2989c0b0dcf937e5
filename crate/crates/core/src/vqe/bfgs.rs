//! Quasi-Newton minimization with an inverse-Hessian BFGS update and
//! backtracking line search.

use super::OptimResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    /// Stop when the gradient norm drops below this.
    pub tolerance: f64,
    /// Function evaluations allowed; a gradient counts as `gradient_cost`.
    pub max_evaluations: u64,
    pub gradient_cost: u64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            tolerance: 1e-5,
            max_evaluations: 200_000,
            gradient_cost: 1,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f` from `x0`. `grad` returns the gradient at a point.
pub fn minimize_bfgs<F, G>(f: F, grad: G, x0: &[f64], opts: &BfgsOptions) -> OptimResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut evals = 0u64;
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = grad(&x);
    evals += 1 + opts.gradient_cost;
    let mut h = identity(n);
    let mut fresh = true;
    let mut iterations = 0;
    let mut converged = norm(&g) < opts.tolerance;
    while !converged && evals < opts.max_evaluations {
        iterations += 1;
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&h[i], &g)).collect();
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            h = identity(n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut alpha = if fresh { (1.0 / norm(&p)).min(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..50 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let ft = f(&trial);
            evals += 1;
            if ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
            if evals >= opts.max_evaluations {
                break;
            }
        }
        let Some((xn, fxn)) = accepted else {
            if fresh {
                break;
            }
            h = identity(n);
            fresh = true;
            continue;
        };
        let gn = grad(&xn);
        evals += opts.gradient_cost;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if fresh {
                let scale = sy / dot(&y, &y);
                h = identity(n);
                h.iter_mut().enumerate().for_each(|(i, row)| row[i] = scale);
                fresh = false;
            }
            update_inverse(&mut h, &s, &y, 1.0 / sy);
        }
        x = xn;
        fx = fxn;
        g = gn;
        converged = norm(&g) < opts.tolerance;
    }
    OptimResult {
        params: x,
        value: fx,
        evaluations: evals,
        iterations,
        converged,
        gradient_norm: Some(norm(&g)),
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect()
}

/// `H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`.
fn update_inverse(h: &mut [Vec<f64>], s: &[f64], y: &[f64], rho: f64) {
    let n = s.len();
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let centre = [1.0, -2.0, 0.5, 3.0, -0.25];
        let w = [1.0, 4.0, 0.5, 10.0, 2.0];
        let f = |x: &[f64]| {
            x.iter()
                .zip(&centre)
                .zip(&w)
                .map(|((a, c), w)| w * (a - c).powi(2))
                .sum::<f64>()
                + 0.3 * (x[0] - 1.0) * (x[1] + 2.0)
        };
        let g = |x: &[f64]| {
            let mut out: Vec<f64> = x
                .iter()
                .zip(&centre)
                .zip(&w)
                .map(|((a, c), w)| 2.0 * w * (a - c))
                .collect();
            out[0] += 0.3 * (x[1] + 2.0);
            out[1] += 0.3 * (x[0] - 1.0);
            out
        };
        let r = minimize_bfgs(
            f,
            g,
            &[0.0; 5],
            &BfgsOptions {
                tolerance: 1e-10,
                ..Default::default()
            },
        );
        assert!(r.converged);
        assert!(r.iterations < 50);
        for (a, c) in r.params.iter().zip(&centre) {
            assert!((a - c).abs() < 1e-8);
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let g = |x: &[f64]| {
            vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        };
        let r = minimize_bfgs(
            f,
            g,
            &[-1.2, 1.0],
            &BfgsOptions {
                tolerance: 1e-8,
                ..Default::default()
            },
        );
        assert!(r.converged);
        assert!((r.params[0] - 1.0).abs() < 1e-6 && (r.params[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let g = |x: &[f64]| {
            vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        };
        let r = minimize_bfgs(
            f,
            g,
            &[-1.2, 1.0],
            &BfgsOptions {
                max_evaluations: 10,
                ..Default::default()
            },
        );
        assert!(!r.converged);
        assert!(r.value <= f(&[-1.2, 1.0]));
    }
}
