//! Coordinate-wise sinusoidal minimization.
//!
//! Along one parameter the cost is a trigonometric polynomial. Three
//! evaluations fix `A cos u + B sin u + C` with `u = ω(θ - θ₀)`; five fix
//! the two-harmonic form `Σ_{m=1,2} (a_m cos mu + b_m sin mu) + c`. Each visit
//! jumps to the minimizer of the fit.

use std::f64::consts::{FRAC_PI_2, PI};

use super::OptimResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NftOptions {
    /// Total cost evaluations.
    pub budget: u64,
    /// Use the five-point two-harmonic fit on every slot.
    pub two_harmonic: bool,
}

impl Default for NftOptions {
    fn default() -> Self {
        NftOptions {
            budget: 65_536,
            two_harmonic: false,
        }
    }
}

/// Minimizer and fitted value of `A cos u + B sin u + C`.
pub fn sinusoid_minimum(e0: f64, e_plus: f64, e_minus: f64) -> (f64, f64) {
    let c = 0.5 * (e_plus + e_minus);
    let b = 0.5 * (e_plus - e_minus);
    let a = e0 - c;
    ((-b).atan2(-a), c - a.hypot(b))
}

/// Minimizer and fitted value of a two-harmonic series sampled at
/// `u_k = 2πk/5`.
pub fn two_harmonic_minimum(e: &[f64; 5]) -> (f64, f64) {
    let mut coef = [0.0f64; 5]; // c, a1, b1, a2, b2
    for (k, &v) in e.iter().enumerate() {
        let u = 2.0 * PI * k as f64 / 5.0;
        coef[0] += v / 5.0;
        coef[1] += 0.4 * v * u.cos();
        coef[2] += 0.4 * v * u.sin();
        coef[3] += 0.4 * v * (2.0 * u).cos();
        coef[4] += 0.4 * v * (2.0 * u).sin();
    }
    let f = |u: f64| {
        coef[0] + coef[1] * u.cos() + coef[2] * u.sin() + coef[3] * (2.0 * u).cos() + coef[4] * (2.0 * u).sin()
    };
    let d1 = |u: f64| {
        -coef[1] * u.sin() + coef[2] * u.cos() - 2.0 * coef[3] * (2.0 * u).sin() + 2.0 * coef[4] * (2.0 * u).cos()
    };
    let d2 = |u: f64| {
        -coef[1] * u.cos() - coef[2] * u.sin() - 4.0 * coef[3] * (2.0 * u).cos() - 4.0 * coef[4] * (2.0 * u).sin()
    };
    let mut best = (0.0, f(0.0));
    for k in 1..256 {
        let u = 2.0 * PI * k as f64 / 256.0;
        let v = f(u);
        if v < best.1 {
            best = (u, v);
        }
    }
    let mut u = best.0;
    for _ in 0..20 {
        let h = d2(u);
        if h <= 0.0 {
            break;
        }
        let step = d1(u) / h;
        u -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    if f(u) < best.1 {
        (u, f(u))
    } else {
        best
    }
}

/// Cyclic coordinate minimization. `frequencies[k]` is the angular
/// frequency used by the three-point fit of slot `k`.
pub fn minimize_nft<F>(mut f: F, x0: &[f64], frequencies: &[f64], opts: &NftOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), frequencies.len());
    let n = x0.len();
    let per_visit = if opts.two_harmonic { 5 } else { 3 };
    let mut x = x0.to_vec();
    let mut evals = 0u64;
    let mut value = f64::NAN;
    let mut iterations = 0;
    'outer: loop {
        for k in 0..n {
            if evals + per_visit > opts.budget {
                break 'outer;
            }
            let base = x[k];
            let mut at = |theta: f64, x: &mut Vec<f64>| {
                x[k] = theta;
                evals += 1;
                f(x)
            };
            if opts.two_harmonic {
                let mut e = [0.0; 5];
                for (j, slot) in e.iter_mut().enumerate() {
                    *slot = at(base + 2.0 * PI * j as f64 / 5.0, &mut x);
                }
                let (u, v) = two_harmonic_minimum(&e);
                x[k] = base + u;
                value = v;
            } else {
                let w = frequencies[k];
                let e0 = at(base, &mut x);
                let ep = at(base + FRAC_PI_2 / w, &mut x);
                let em = at(base - FRAC_PI_2 / w, &mut x);
                let (u, v) = sinusoid_minimum(e0, ep, em);
                x[k] = base + u / w;
                value = v;
            }
            iterations += 1;
        }
        if n == 0 {
            break;
        }
    }
    if value.is_nan() {
        value = f(&x);
        evals += 1;
    }
    OptimResult {
        params: x,
        value,
        evaluations: evals,
        iterations,
        converged: true,
        gradient_norm: None,
    }
}
