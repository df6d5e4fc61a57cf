//! Heat kernels of the odd-dimensional real hyperbolic spaces,
//!
//! ```text
//! q_{t,2k+1}(cosh s) = e^{-k^2 t} / ((2 pi)^k sqrt(4 pi t)) * (-(1/sinh s) d/ds)^k e^{-s^2/4t},
//! ```
//!
//! evaluated without numerical differentiation. The iterated operator is
//! expanded once per `k` into an [`ExpTermSum`], a finite sum of terms
//! `c(1/t) s^a csch^b(s) coth^c(s) e^{-s^2/4t}` with exact rational
//! coefficients. Near `s = 0` those terms blow up like `s^{-2k}` while their
//! sum stays finite, so below [`SMALL_S`] the kernel is evaluated from an
//! exact Taylor expansion in `s^2` built by the same lowering recursion acting
//! on power series.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Largest odd dimension supported.
pub const MAX_DIM: usize = 15;
const MAX_K: usize = (MAX_DIM - 1) / 2;

/// Switch-over distance between the Taylor expansion and the closed form.
pub const SMALL_S: f64 = 1.0;
/// Number of even Taylor coefficients retained (`s^0 .. s^{2 (N - 1)}`).
const SERIES_TERMS: usize = 40;

/// A polynomial in `tau = 1/t` with exact rational coefficients, keyed by
/// exponent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TauPoly(pub BTreeMap<u32, BigRational>);

impl TauPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = TauPoly::default();
        p.add_term(0, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, exp: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(exp).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&exp);
        }
    }

    pub fn add_poly(&mut self, other: &TauPoly, factor: &BigRational, shift: u32) {
        for (e, c) in &other.0 {
            self.add_term(e + shift, c * factor);
        }
    }

    pub fn scaled(&self, factor: &BigRational, shift: u32) -> TauPoly {
        let mut p = TauPoly::default();
        p.add_poly(self, factor, shift);
        p
    }

    pub fn to_f64(&self) -> Vec<(u32, f64)> {
        self.0
            .iter()
            .map(|(e, c)| (*e, rational_to_f64(c)))
            .collect()
    }
}

impl fmt::Display for TauPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.0.iter().rev() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{mag}")?,
                _ => write!(f, "{mag}*t^-{e}")?,
            }
        }
        Ok(())
    }
}

fn rational_to_f64(c: &BigRational) -> f64 {
    // numerator and denominator stay far below f64 range for k <= 7
    let n = c.numer().to_f64().unwrap_or(f64::NAN);
    let d = c.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// One term `coeff(1/t) s^pow_s csch^pow_csch(s) coth^pow_coth(s) e^{-s^2/4t}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpTerm {
    pub coeff: TauPoly,
    pub pow_s: u32,
    pub pow_csch: u32,
    pub pow_coth: u32,
}

/// Canonical sum of [`ExpTerm`]s: at most one term per exponent triple and
/// no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpTermSum {
    terms: BTreeMap<(u32, u32, u32), TauPoly>,
}

impl ExpTermSum {
    /// The bare Gaussian `e^{-s^2/4t}`.
    pub fn gaussian() -> Self {
        let mut s = ExpTermSum::default();
        s.add((0, 0, 0), &TauPoly::constant(BigRational::one()), &BigRational::one(), 0);
        s
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, key: (u32, u32, u32), poly: &TauPoly, factor: &BigRational, shift: u32) {
        let entry = self.terms.entry(key).or_default();
        entry.add_poly(poly, factor, shift);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_sum(&self, other: &ExpTermSum) -> ExpTermSum {
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add(*k, p, &BigRational::one(), 0);
        }
        out
    }

    /// Terms in ascending `(pow_s, pow_csch, pow_coth)` order.
    pub fn terms(&self) -> impl Iterator<Item = ExpTerm> + '_ {
        self.terms.iter().map(|(&(a, b, c), p)| ExpTerm {
            coeff: p.clone(),
            pow_s: a,
            pow_csch: b,
            pow_coth: c,
        })
    }

    /// Terms ordered by descending `(pow_csch, pow_coth, pow_s)`, the order
    /// used for the textual dump.
    pub fn dump_order(&self) -> Vec<ExpTerm> {
        let mut v: Vec<ExpTerm> = self.terms().collect();
        v.sort_by(|x, y| {
            (y.pow_csch, y.pow_coth, y.pow_s).cmp(&(x.pow_csch, x.pow_coth, x.pow_s))
        });
        v
    }

    /// `sum_terms coeff(1/t) s^a csch^b coth^c` (without the Gaussian).
    pub fn eval_bracket(&self, t: f64, s: f64) -> f64 {
        let tau = 1.0 / t;
        self.terms
            .iter()
            .map(|(&(a, b, c), p)| {
                let cf: f64 = p.to_f64().iter().map(|(e, v)| v * tau.powi(*e as i32)).sum();
                cf * s.powi(a as i32) * (1.0 / s.sinh()).powi(b as i32) * (1.0 / s.tanh()).powi(c as i32)
            })
            .sum()
    }
}

/// One application of `sign * (1/sinh s) d/ds`.
///
/// `d/ds [s^a csch^b coth^c e^{-s^2/4t}] = [a s^{a-1} csch^b coth^c
/// - b s^a csch^b coth^{c+1} - c s^a csch^{b+2} coth^{c-1}
/// - (1/2t) s^{a+1} csch^b coth^c] e^{-s^2/4t}`.
pub fn apply_lowering(sum: &ExpTermSum, sign: i32) -> ExpTermSum {
    assert!(sign == 1 || sign == -1);
    let sg = rat(i64::from(sign), 1);
    let mut out = ExpTermSum::default();
    for (&(a, b, c), p) in &sum.terms {
        if a > 0 {
            out.add((a - 1, b + 1, c), p, &(&sg * rat(i64::from(a), 1)), 0);
        }
        if b > 0 {
            out.add((a, b + 1, c + 1), p, &(&sg * rat(-i64::from(b), 1)), 0);
        }
        if c > 0 {
            out.add((a, b + 3, c - 1), p, &(&sg * rat(-i64::from(c), 1)), 0);
        }
        out.add((a + 1, b + 1, c), p, &(&sg * rat(-1, 2)), 1);
    }
    out
}

/// `(-(1/sinh s) d/ds)^k e^{-s^2/4t}` for `k = 0..=7`, built once.
pub fn lowering_chain() -> &'static [ExpTermSum] {
    static CHAIN: OnceLock<Vec<ExpTermSum>> = OnceLock::new();
    CHAIN.get_or_init(|| {
        let mut v = vec![ExpTermSum::gaussian()];
        for k in 0..MAX_K {
            let next = apply_lowering(&v[k], -1);
            v.push(next);
        }
        v
    })
}

/// Even power series in `s` with coefficients in `Q[1/t]`; index = power of `s`.
type TauSeries = Vec<TauPoly>;

fn sinh_coeffs(len: usize) -> Vec<BigRational> {
    // coefficient of s^{2j+1} is 1/(2j+1)!
    let mut out = Vec::with_capacity(len);
    let mut fact = BigInt::one();
    for j in 0..len {
        if j > 0 {
            fact *= BigInt::from((2 * j) * (2 * j + 1));
        }
        out.push(BigRational::new(BigInt::one(), fact.clone()));
    }
    out
}

/// Taylor coefficients of `B_k(s) = e^{s^2/4t} (-(1/sinh s) d/ds)^k e^{-s^2/4t}`
/// in powers of `s^2`, for `k = 0..=7`.
///
/// `B_{k+1} = (-B_k' + (s / 2t) B_k) / sinh s`; each step loses the highest
/// known order, so the recursion starts `MAX_K` orders deeper.
fn build_small_s_series() -> Vec<Vec<TauPoly>> {
    let total = SERIES_TERMS + MAX_K;
    let sinh = sinh_coeffs(total + 1);
    // B_0 = 1
    let mut b: TauSeries = vec![TauPoly::default(); 2 * total];
    b[0] = TauPoly::constant(BigRational::one());
    let mut known = total; // number of valid even coefficients
    let mut out = vec![even_part(&b, SERIES_TERMS)];
    for _ in 0..MAX_K {
        // numerator, odd powers s^{2j+1} for j < known - 1
        let n_odd = known - 1;
        let mut num: Vec<TauPoly> = vec![TauPoly::default(); n_odd];
        for (j, slot) in num.iter_mut().enumerate() {
            // -B' at s^{2j+1}: -(2j+2) * B_{2j+2}
            slot.add_poly(&b[2 * j + 2], &rat(-(2 * j as i64 + 2), 1), 0);
            // (tau / 2) s B at s^{2j+1}: (1/2) tau * B_{2j}
            slot.add_poly(&b[2 * j], &rat(1, 2), 1);
        }
        // divide by sinh: Q_{2j} = N_{2j+1} - sum_{l<j} Q_{2l} / (2(j-l)+1)!
        let mut q: Vec<TauPoly> = Vec::with_capacity(n_odd);
        for j in 0..n_odd {
            let mut acc = num[j].clone();
            for l in 0..j {
                acc.add_poly(&q[l], &(-&sinh[j - l]), 0);
            }
            q.push(acc);
        }
        let mut nb: TauSeries = vec![TauPoly::default(); 2 * total];
        for (j, p) in q.into_iter().enumerate() {
            nb[2 * j] = p;
        }
        b = nb;
        known = n_odd;
        out.push(even_part(&b, SERIES_TERMS));
    }
    out
}

fn even_part(b: &TauSeries, n: usize) -> Vec<TauPoly> {
    (0..n).map(|j| b[2 * j].clone()).collect()
}

/// Polynomial in `tau` as `(exponent, coeff)` pairs.
type TauF64 = Vec<(u32, f64)>;

/// Per-`k` evaluation data with `f64` coefficients.
struct Compiled {
    /// `(pow_s, pow_csch, pow_coth, [(tau exponent, coeff)])`
    terms: Vec<(i32, i32, i32, TauF64)>,
    /// even Taylor coefficients, each a polynomial in tau
    series: Vec<TauF64>,
}

fn compiled() -> &'static [Compiled] {
    static C: OnceLock<Vec<Compiled>> = OnceLock::new();
    C.get_or_init(|| {
        let series = build_small_s_series();
        lowering_chain()
            .iter()
            .zip(series)
            .map(|(sum, ser)| Compiled {
                terms: sum
                    .terms
                    .iter()
                    .map(|(&(a, b, c), p)| (a as i32, b as i32, c as i32, p.to_f64()))
                    .collect(),
                series: ser.iter().map(TauPoly::to_f64).collect(),
            })
            .collect()
    })
}

/// The exact Taylor coefficients (powers of `s^2`) of the bracket
/// `e^{s^2/4t} (-(1/sinh s) d/ds)^k e^{-s^2/4t}`.
pub fn small_s_coefficients(k: usize) -> Vec<TauPoly> {
    static S: OnceLock<Vec<Vec<TauPoly>>> = OnceLock::new();
    S.get_or_init(build_small_s_series)[k].clone()
}

#[inline]
fn eval_tau(p: &[(u32, f64)], tau: f64) -> f64 {
    p.iter().map(|(e, c)| c * tau.powi(*e as i32)).sum()
}

/// A value stored as `mant * exp(log)` to survive the extreme magnitudes of
/// the Gaussian tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: f64,
    pub log: f64,
}

impl Scaled {
    pub fn value(&self) -> f64 {
        if self.mant == 0.0 {
            0.0
        } else {
            self.mant * self.log.exp()
        }
    }
}

/// Which evaluation route to use for the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketRoute {
    Auto,
    Series,
    ClosedForm,
}

fn half_dim(n: usize) -> Result<usize> {
    if n.is_multiple_of(2) || n == 0 || n > MAX_DIM {
        return Err(domain(format!("dimension n = {n} must be odd and in 1..={MAX_DIM}")));
    }
    Ok((n - 1) / 2)
}

/// `(-(1/sinh s) d/ds)^k e^{-s^2/4t}` as a [`Scaled`] value.
pub fn lowered_gaussian(k: usize, t: f64, s: f64, route: BracketRoute) -> Scaled {
    let c = &compiled()[k];
    let tau = 1.0 / t;
    let use_series = match route {
        BracketRoute::Auto => s < SMALL_S,
        BracketRoute::Series => true,
        BracketRoute::ClosedForm => false,
    };
    let gauss = -s * s * tau / 4.0;
    if use_series || k == 0 {
        let s2 = s * s;
        // Horner in s^2
        let mant = c
            .series
            .iter()
            .rev()
            .fold(0.0, |acc, p| acc * s2 + eval_tau(p, tau));
        return Scaled { mant, log: gauss };
    }
    // csch s = e^{-s} * 2/(1 - e^{-2s}); every term carries at least csch^k
    let e2 = (-2.0 * s).exp();
    let csch_scaled = 2.0 / (1.0 - e2);
    let coth = (1.0 + e2) / (1.0 - e2);
    let es = (-s).exp();
    let kk = k as i32;
    let mant = c
        .terms
        .iter()
        .map(|(a, b, cc, p)| {
            eval_tau(p, tau)
                * s.powi(*a)
                * csch_scaled.powi(*b)
                * coth.powi(*cc)
                * es.powi(*b - kk)
        })
        .sum();
    Scaled { mant, log: gauss - k as f64 * s }
}

/// `q_{t,n}(cosh s)` as a [`Scaled`] value.
pub fn hyperbolic_kernel_scaled(n: usize, t: f64, s: f64) -> Result<Scaled> {
    let k = half_dim(n)?;
    if !(t > 0.0) || !(s >= 0.0) {
        return Err(domain(format!("need t > 0 and s >= 0 (t = {t}, s = {s})")));
    }
    Ok(kernel_scaled_unchecked(k, t, s, BracketRoute::Auto))
}

#[inline]
pub(crate) fn kernel_scaled_unchecked(k: usize, t: f64, s: f64, route: BracketRoute) -> Scaled {
    let kf = k as f64;
    let ln_pref = -kf * kf * t - kf * (2.0 * PI).ln() - 0.5 * (4.0 * PI * t).ln();
    let b = lowered_gaussian(k, t, s, route);
    Scaled { mant: b.mant, log: b.log + ln_pref }
}

/// `q_{t,n}(cosh s)` for odd `n <= 15`.
pub fn hyperbolic_heat_kernel(n: usize, t: f64, s: f64) -> Result<f64> {
    Ok(hyperbolic_kernel_scaled(n, t, s)?.value())
}

/// Same kernel with an explicit bracket route, for cross-checking the two
/// evaluation paths.
pub fn hyperbolic_heat_kernel_route(n: usize, t: f64, s: f64, route: BracketRoute) -> Result<f64> {
    let k = half_dim(n)?;
    Ok(kernel_scaled_unchecked(k, t, s, route).value())
}

/// `arccosh(cosh r cosh u)` without cancellation near the origin.
pub fn composed_distance(r: f64, u: f64) -> f64 {
    let a = (0.5 * r).sinh();
    let b = (0.5 * u).sinh();
    let arg = a * a * u.cosh() + b * b;
    2.0 * arg.sqrt().asinh()
}

/// `q_{t,n}(cosh r cosh u)`.
pub fn q_at_cosh(n: usize, t: f64, r: f64, u: f64) -> Result<f64> {
    if !(r >= 0.0) || !(u >= 0.0) {
        return Err(domain("q_at_cosh needs r >= 0 and u >= 0"));
    }
    hyperbolic_heat_kernel(n, t, composed_distance(r, u))
}

pub(crate) fn q_at_cosh_scaled(k: usize, t: f64, r: f64, u: f64) -> Scaled {
    kernel_scaled_unchecked(k, t, composed_distance(r, u), BracketRoute::Auto)
}

/// Text table of the expanded operator for dimension `n`, one term per line:
/// `coeff, pow_s, pow_csch, pow_coth`.
pub fn term_table(n: usize) -> Result<String> {
    let k = half_dim(n)?;
    let mut out = String::new();
    for term in lowering_chain()[k].dump_order() {
        out.push_str(&format!(
            "{}, {}, {}, {}\n",
            term.coeff, term.pow_s, term.pow_csch, term.pow_coth
        ));
    }
    Ok(out)
}
