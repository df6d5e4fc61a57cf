//! Oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Generalised binomial `C(a, k)` for real `a`.
pub fn binom(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a - j as f64) / (j + 1) as f64)
}

/// Explicit-sum form of `P_n^{(alpha, alpha)}(x)`:
/// `sum_s C(n+a, n-s) C(n+a, s) ((x-1)/2)^s ((x+1)/2)^{n-s}`.
pub fn jacobi_explicit(n: usize, alpha: f64, x: f64) -> f64 {
    jacobi_explicit_with_scale(n, alpha, x).0
}

/// The explicit sum together with the sum of its absolute terms, which
/// bounds its own rounding error.
pub fn jacobi_explicit_with_scale(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    let (a, b) = ((x - 1.0) / 2.0, (x + 1.0) / 2.0);
    (0..=n)
        .map(|s| binom(n as f64 + alpha, n - s) * binom(n as f64 + alpha, s) * a.powi(s as i32) * b.powi((n - s) as i32))
        .fold((0.0, 0.0), |(v, w), term| (v + term, w + term.abs()))
}

/// `Gamma(k / 2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    let mut g = if k.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    while 2.0 * x < k as f64 - 0.5 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Area of the unit sphere `S^dim`.
pub fn sphere_area(dim: u32) -> f64 {
    2.0 * PI.powf((dim + 1) as f64 / 2.0) / gamma_half(dim + 1)
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `(4 D(h/2) - D(h)) / 3` for the first and second central differences.
pub fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> (f64, f64) {
    let f0 = f(x);
    let d = |h: f64| {
        let (p, m) = (f(x + h), f(x - h));
        ((p - m) / (2.0 * h), (p - 2.0 * f0 + m) / (h * h))
    };
    let (a1, a2) = d(h);
    let (b1, b2) = d(0.5 * h);
    ((4.0 * b1 - a1) / 3.0, (4.0 * b2 - a2) / 3.0)
}

/// Dimension of degree-`m` harmonics on `S^7`, counted as
/// `C(m+7, 7) - C(m+5, 7)`.
pub fn harmonic_dim(m: usize) -> f64 {
    let c = |n: usize| if n < 7 { 0.0 } else { binom(n as f64, 7) };
    c(m + 7) - c(m + 5)
}
