//! Jacobi polynomials, Chebyshev polynomials of the first kind and the
//! terminating Gauss hypergeometric sum `2F1(m+3, -m-3; 1/2; (1-x)/2)`.
//!
//! Everything is evaluated by three-term recurrences in the degree. Callers
//! that need very high degrees at arguments far outside `[-1, 1]` use the
//! scaled variants, which return `P_m(x) / sigma^m` to stay inside `f64`
//! range.

/// Jacobi parameter used throughout: the radial Laplacian on `S^7` has
/// eigenfunctions `P_m^{(5/2, 5/2)}(cos eta)`.
pub const FIBER_ALPHA: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiIndex {
    pub m: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiIndex {
    pub fn new(m: usize, alpha: f64, beta: f64) -> Self {
        assert!(alpha > -1.0 && beta > -1.0, "Jacobi parameters must exceed -1");
        JacobiIndex { m, alpha, beta }
    }

    /// `P_m^{(5/2, 5/2)}`.
    pub fn fiber(m: usize) -> Self {
        JacobiIndex::new(m, FIBER_ALPHA, FIBER_ALPHA)
    }
}

/// Recurrence coefficients `(a, b, c)` with `P_n = (a x + b) P_{n-1} - c P_{n-2}`, `n >= 2`.
#[inline]
fn jacobi_rec(n: usize, alpha: f64, beta: f64) -> (f64, f64, f64) {
    let n = n as f64;
    let s = 2.0 * n + alpha + beta;
    let den = 2.0 * n * (n + alpha + beta) * (s - 2.0);
    let a = (s - 1.0) * s * (s - 2.0) / den;
    let b = (s - 1.0) * (alpha * alpha - beta * beta) / den;
    let c = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * s / den;
    (a, b, c)
}

#[inline]
fn jacobi_p1(alpha: f64, beta: f64, x: f64) -> f64 {
    (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
}

/// Degree-`m` Jacobi polynomial at any real `x` (the polynomial continues
/// analytically outside `[-1, 1]`).
pub fn jacobi_poly(idx: JacobiIndex, x: f64) -> f64 {
    let JacobiIndex { m, alpha, beta } = idx;
    if m == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = jacobi_p1(alpha, beta, x);
    for n in 2..=m {
        let (a, b, c) = jacobi_rec(n, alpha, beta);
        let p2 = (a * x + b) * p1 - c * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_0(x), ..., P_{m_max}(x)` scaled by `sigma^{-n}`.
///
/// `sigma = 1` gives the plain values. For `x >> 1` pass `sigma = x` so the
/// entries stay `O(1)`.
pub fn jacobi_scaled_all(m_max: usize, alpha: f64, beta: f64, x: f64, sigma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(1.0);
    if m_max == 0 {
        return out;
    }
    out.push(jacobi_p1(alpha, beta, x) / sigma);
    let inv = 1.0 / sigma;
    for n in 2..=m_max {
        let (a, b, c) = jacobi_rec(n, alpha, beta);
        let v = (a * x + b) * inv * out[n - 1] - c * inv * inv * out[n - 2];
        out.push(v);
    }
    out
}

/// `ln Gamma(k / 2)` for a positive integer `k`.
pub fn ln_gamma_half(k: u32) -> f64 {
    assert!(k > 0);
    let j = (k / 2) as usize;
    if k.is_multiple_of(2) {
        ln_factorial(j - 1)
    } else {
        // Gamma(j + 1/2) = (2j)! sqrt(pi) / (4^j j!)
        ln_factorial(2 * j) + 0.5 * std::f64::consts::PI.ln()
            - 2.0 * j as f64 * std::f64::consts::LN_2
            - ln_factorial(j)
    }
}

const LN_FACTORIAL_TABLE: usize = 4096;

pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut acc = 0.0;
        v.push(0.0);
        for k in 1..LN_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            v.push(acc);
        }
        v
    });
    match table.get(n) {
        Some(&v) => v,
        None => table[LN_FACTORIAL_TABLE - 1] + (LN_FACTORIAL_TABLE..=n).map(|k| (k as f64).ln()).sum::<f64>(),
    }
}

/// `P_m^{(alpha, beta)}(1) = Gamma(m + alpha + 1) / (m! Gamma(alpha + 1))`
/// for half-integer or integer `alpha`.
pub fn jacobi_at_one(m: usize, alpha: f64) -> f64 {
    // product form avoids gamma functions entirely
    (1..=m).fold(1.0, |acc, k| acc * (k as f64 + alpha) / k as f64)
}

/// `N_m = int_0^pi [P_m^{(5/2,5/2)}(cos eta)]^2 sin^6 eta d eta`, from the
/// closed-form orthogonality constant.
pub fn jacobi_norm_sq(m: usize) -> f64 {
    ln_jacobi_norm_sq(m).exp()
}

pub fn ln_jacobi_norm_sq(m: usize) -> f64 {
    // 2^6 / (2m + 6) * Gamma(m + 7/2)^2 / (m! (m + 5)!)
    let g = ln_gamma_half(2 * m as u32 + 7);
    6.0 * std::f64::consts::LN_2 - ((2 * m + 6) as f64).ln() + 2.0 * g
        - ln_factorial(m)
        - ln_factorial(m + 5)
}

/// Dimension of the degree-`m` spherical harmonics on `S^7`,
/// `(2m + 6)(m + 5)! / (m! 6!)`.
pub fn s7_harmonic_dim(m: usize) -> f64 {
    let mf = m as f64;
    (2.0 * mf + 6.0) * (1..=5).map(|k| mf + k as f64).product::<f64>() / 720.0
}

/// Chebyshev polynomial of the first kind by its three-term recurrence.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut t0, mut t1) = (1.0, x);
    for _ in 2..=n {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// Finite series of `2F1(m+3, -m-3; 1/2; (1-x)/2)` (`m + 4` terms).
///
/// Term magnitudes are accumulated as logarithms with an explicit sign so the
/// factorial ratios never overflow.
pub fn hyp2f1_terminating(m: usize, x: f64) -> f64 {
    let a = (m + 3) as f64;
    let b = -a;
    let c = 0.5;
    let z = (1.0 - x) / 2.0;
    if z == 0.0 {
        return 1.0;
    }
    let ln_z = z.abs().ln();
    let z_neg = z < 0.0;
    let mut ln_coef = 0.0;
    let mut sign = 1.0;
    let mut sum = 1.0;
    for j in 0..(m + 3) {
        let jf = j as f64;
        let num_b = b + jf;
        ln_coef += (a + jf).ln() + num_b.abs().ln() - (c + jf).ln() - (jf + 1.0).ln();
        if num_b < 0.0 {
            sign = -sign;
        }
        let k = j + 1;
        let zsign = if z_neg && k % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * zsign * (ln_coef + k as f64 * ln_z).exp();
    }
    sum
}
