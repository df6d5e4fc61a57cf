//! Heat kernel `s_t(eta, u)` of the Jacobi operator `d^2/d eta^2 + 6 cot(eta) d/d eta`
//! (the radial Laplacian of `S^7`) with respect to `sin^6(eta) d eta`, its
//! analytic continuation `u -> i u`, and the mode profiles `h_m`.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::hyperbolic::Scaled;
use crate::quadrature::GaussLegendre;
use crate::special::{
    jacobi_at_one, jacobi_scaled_all, ln_factorial, ln_jacobi_norm_sq, FIBER_ALPHA,
};

/// Normalisation convention for the spectral coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesMode {
    /// The closed-form constant `(1/pi) 2^{4m+7} m! (m+5)! ((m+3)!)^2 / ((2m+6)! (2m+5)!)`.
    PaperConstant,
    /// `1 / N_m`, forced by `int_0^pi s_t(eta, u) sin^6 u du = 1`.
    #[default]
    Normalized,
}

impl std::str::FromStr for SeriesMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_constant" | "paper-constant" => Ok(SeriesMode::PaperConstant),
            "normalized" => Ok(SeriesMode::Normalized),
            other => Err(Error::Config(format!("unknown series mode '{other}'"))),
        }
    }
}

/// Truncation control shared by all spectral series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Relative truncation tolerance, measured against the largest term.
    pub tol: f64,
    /// Hard cap on the degree.
    pub m_cap: usize,
    pub mode: SeriesMode,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            tol: 1e-17,
            m_cap: 400,
            mode: SeriesMode::Normalized,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config("series tol must be > 0".into()));
        }
        if self.m_cap < 1 {
            return Err(Error::Config("m_cap must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberKernelValue {
    pub value: f64,
    pub m_used: usize,
    /// Bound on the discarded tail.
    pub tail_bound: f64,
}

/// `m (m + 6)`, the eigenvalue of `-(d^2/d eta^2 + 6 cot eta d/d eta)` on `P_m(cos eta)`.
pub fn eigenvalue(m: usize) -> f64 {
    (m * (m + 6)) as f64
}

pub fn ln_spectral_coeff(m: usize, mode: SeriesMode) -> f64 {
    match mode {
        SeriesMode::Normalized => -ln_jacobi_norm_sq(m),
        SeriesMode::PaperConstant => {
            -std::f64::consts::PI.ln()
                + (4 * m + 7) as f64 * std::f64::consts::LN_2
                + ln_factorial(m)
                + ln_factorial(m + 5)
                + 2.0 * ln_factorial(m + 3)
                - ln_factorial(2 * m + 6)
                - ln_factorial(2 * m + 5)
        }
    }
}

/// Coefficient `c_m` of `e^{-m(m+6)t} P_m(cos eta) P_m(cos u)` in the kernel.
pub fn spectral_coeff(m: usize, mode: SeriesMode) -> f64 {
    ln_spectral_coeff(m, mode).exp()
}

/// Sums `sum_m c_m e^{-m(m+6)t} a_m P_m(x)` for prescribed weights `a_m`
/// (typically `P_m(cos eta)`), with `|a_m| <= P_m(1)` assumed for the
/// truncation bound.
///
/// Returns the sum as a [`Scaled`] value together with the number of terms
/// and the tail bound (both relative to the same scale).
pub(crate) fn continued_series(
    t: f64,
    x: f64,
    weights: &[f64],
    ln_coeffs: &[f64],
    ctrl: &SeriesControl,
) -> Result<(Scaled, usize, f64)> {
    let m_cap = ctrl.m_cap.min(weights.len() - 1).min(ln_coeffs.len() - 1);
    let sigma = x.abs().max(1.0);
    let ln_sigma = sigma.ln();
    let p = jacobi_scaled_all(m_cap, FIBER_ALPHA, FIBER_ALPHA, x, sigma);
    let ln_tol = ctrl.tol.ln();

    // log-magnitudes first, then one rescaled sum
    let mut logs: Vec<f64> = Vec::with_capacity(m_cap + 1);
    let mut signs: Vec<f64> = Vec::with_capacity(m_cap + 1);
    let mut max_bound = f64::NEG_INFINITY;
    let mut prev_bound = f64::NEG_INFINITY;
    let mut stop = None;
    for m in 0..=m_cap {
        let ln_common = ln_coeffs[m] - eigenvalue(m) * t + m as f64 * ln_sigma;
        let pm = p[m];
        // |P_m| <= P_m(1) on [-1, 1]; beyond 1 all roots are behind us
        let p_env = if x.abs() <= 1.0 {
            jacobi_at_one(m, FIBER_ALPHA)
        } else {
            pm.abs()
        };
        let ln_bound = ln_common + jacobi_at_one(m, FIBER_ALPHA).ln() + p_env.ln();
        let term = pm * weights[m];
        logs.push(ln_common + term.abs().ln());
        signs.push(term.signum());
        if ln_bound.is_finite() {
            max_bound = max_bound.max(ln_bound);
            if m > 0 && ln_bound < prev_bound && ln_bound < max_bound + ln_tol {
                stop = Some((m, ln_bound, ln_bound - prev_bound));
                break;
            }
            prev_bound = ln_bound;
        }
    }
    let (m_used, ln_last, ln_ratio) = match stop {
        Some(s) => s,
        None => {
            return Err(Error::SeriesNonConvergence {
                m_cap,
                tail: (prev_bound - max_bound).exp(),
            })
        }
    };
    let lmax = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mant: f64 = if lmax.is_finite() {
        logs.iter()
            .zip(&signs)
            .filter(|(l, _)| l.is_finite())
            .map(|(l, s)| s * (l - lmax).exp())
            .sum()
    } else {
        0.0
    };
    let ratio = ln_ratio.exp();
    let tail_ln = ln_last - (1.0 - ratio).max(1e-300).ln();
    let log = if lmax.is_finite() { lmax } else { 0.0 };
    Ok((Scaled { mant, log }, m_used, (tail_ln - log).exp()))
}

/// `s_t(eta, u)` (`continued = false`) or its continuation `s_t(eta, i u)`,
/// where `cos u` is replaced by `cosh u` (`continued = true`).
pub fn fiber_heat_kernel(
    t: f64,
    eta: f64,
    u: f64,
    continued: bool,
    ctrl: &SeriesControl,
) -> Result<FiberKernelValue> {
    ctrl.validate()?;
    if !(t > 0.0) {
        return Err(domain(format!("t = {t} must be > 0")));
    }
    if !(0.0..=std::f64::consts::PI).contains(&eta) {
        return Err(domain(format!("eta = {eta} outside [0, pi]")));
    }
    if continued && !(u >= 0.0) {
        return Err(domain(format!("continued argument u = {u} must be >= 0")));
    }
    if !continued && !(0.0..=std::f64::consts::PI).contains(&u) {
        return Err(domain(format!("u = {u} outside [0, pi]")));
    }
    let x = if continued { u.cosh() } else { u.cos() };
    let weights = jacobi_scaled_all(ctrl.m_cap, FIBER_ALPHA, FIBER_ALPHA, eta.cos(), 1.0);
    let ln_c: Vec<f64> = (0..=ctrl.m_cap).map(|m| ln_spectral_coeff(m, ctrl.mode)).collect();
    let (s, m_used, tail_rel) = continued_series(t, x, &weights, &ln_c, ctrl)?;
    let value = s.value();
    Ok(FiberKernelValue {
        value,
        m_used,
        tail_bound: tail_rel * s.log.exp(),
    })
}

/// `(15/16) int_0^pi (cos eta + i sin eta cos phi)^m sin^5 phi d phi` before
/// discarding the imaginary part. With `x = cos phi` the integrand becomes the
/// polynomial `(cos eta + i x sin eta)^m (1 - x^2)^2`, so
/// `ceil((m + 6)/2) + 8` Gauss–Legendre nodes integrate it exactly.
pub fn h_m_complex(m: usize, eta: f64) -> Complex64 {
    let n = (m + 6).div_ceil(2) + 8;
    let gl = GaussLegendre::cached(n);
    let (c, s) = (eta.cos(), eta.sin());
    let sum: Complex64 = gl
        .nodes
        .iter()
        .zip(&gl.weights)
        .map(|(&x, &w)| {
            let z = Complex64::new(c, s * x);
            let wt = (1.0 - x * x) * (1.0 - x * x);
            z.powu(m as u32) * (w * wt)
        })
        .sum();
    sum * (15.0 / 16.0)
}

/// Real mode profile `h_m(eta)`.
pub fn h_m(m: usize, eta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&eta) {
        return Err(domain(format!("eta = {eta} outside [0, pi]")));
    }
    let z = h_m_complex(m, eta);
    if z.im.abs() > 1e-10 {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}
