//! The subelliptic heat kernel `p_t(r, eta)` issued from `r = eta = 0`, taken
//! with respect to `d mu = (pi^7/90) sinh^7 r cosh^7 r sin^6 eta dr d eta`.
//!
//! Two representations are implemented:
//!
//! * [`p_rep1`]: `int_0^inf s_t(eta, i u) q_{t,15}(cosh r cosh u) sinh^6 u du`.
//! * [`p_rep2`]: a mode series over `cosh((m + 3) u) q_{t,9}(cosh r cosh u)`,
//!   either summed mode by mode ([`Rep2Path::ModeSeries`]) or as a double
//!   integral over `(phi, u)` of the generating series `G_t`
//!   ([`Rep2Path::Direct2d`]).
//!
//! Three integrations by parts in `cosh u` turn the first representation into
//! the second. Doing so produces a factor `1 / cosh^3 r` and, for mode `m`,
//! the weight `A_m P_m(1) / (N_m (2 pi)^3) = (6 / pi^4) d_m`, where `d_m` is
//! the dimension of the degree-`m` harmonics on `S^7` (see
//! [`reconciled_mode_weight`]). [`Rep2Weights::Reconciled`] carries those
//! factors; [`Rep2Weights::Printed`] keeps the bare constant `2` for audit.

mod measure;
mod operator;

pub use measure::{total_mass, weighted_integral, KernelGrid, MeasureSpec};
pub use operator::{apply_radial_sublaplacian, heat_residual, FdSteps, Residual};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::fiber::{
    continued_series, eigenvalue, h_m, ln_spectral_coeff, SeriesControl, SeriesMode,
};
use crate::hyperbolic::{q_at_cosh_scaled, Scaled};
use crate::quadrature::{composite_nodes, GaussLegendre};
use crate::special::{
    jacobi_at_one, jacobi_norm_sq, jacobi_scaled_all, ln_factorial, s7_harmonic_dim, FIBER_ALPHA,
};

/// Shift between the `S^7` spectrum and the exponent of the mode series:
/// `e^{-(m(m+6) + 33) t}`.
pub const MODE_SHIFT: f64 = 33.0;

/// Stability floor for the continued series.
pub const MIN_TIME: f64 = 0.05;

/// Query point `(t, r, eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub r: f64,
    pub eta: f64,
}

impl KernelPoint {
    pub fn new(t: f64, r: f64, eta: f64) -> Result<Self> {
        let p = KernelPoint { t, r, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) {
            return Err(domain(format!("t = {} must be > 0", self.t)));
        }
        if !(self.r >= 0.0) {
            return Err(domain(format!("r = {} must be >= 0", self.r)));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.eta) {
            return Err(domain(format!("eta = {} outside [0, pi]", self.eta)));
        }
        Ok(())
    }
}

/// Discretisation of the `u` half-line (and of `phi` for the direct path).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Truncation of the half-line; `None` picks `r + 8 sqrt(t) + 2`.
    pub u_max: Option<f64>,
    /// Gauss–Legendre order per `u` panel.
    pub n_u: usize,
    /// Panel width in `u`.
    pub panel_width: f64,
    /// Gauss–Legendre order in `cos(phi)` for the direct path.
    pub n_phi: usize,
    /// Target relative error.
    pub tol: f64,
    /// Node doublings (and `u_max` doublings) allowed before giving up.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            u_max: None,
            n_u: 16,
            panel_width: 1.0,
            n_phi: 48,
            tol: 1e-10,
            max_refinements: 4,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if let Some(u) = self.u_max {
            if !(u > 0.0) {
                return Err(Error::Config("u_max must be > 0".into()));
            }
        }
        if self.n_u < 16 || self.n_phi < 16 {
            return Err(Error::Config("node counts must be >= 16".into()));
        }
        if !(self.panel_width > 0.0) || !(self.tol > 0.0) {
            return Err(Error::Config("panel width and tol must be > 0".into()));
        }
        Ok(())
    }

    pub fn default_u_max(t: f64, r: f64) -> f64 {
        r + 8.0 * t.sqrt() + 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelResult {
    pub value: f64,
    pub est_error: f64,
    pub m_used: usize,
    pub u_max_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rep2Path {
    Direct2d,
    #[default]
    ModeSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rep2Weights {
    /// `1/cosh^3 r` and multiplicity weights; agrees with the first representation.
    #[default]
    Reconciled,
    /// Bare constant `2` in front of the mode series (`15/8` in `G_t`).
    Printed,
}

/// `A_m P_m(1) / (N_m (2 pi)^3)` with `A_m = k_m (m+3)(m+4)(m+5) / 2^{m+2}`
/// the constant in `d^3/dy^3 [(y^2-1)^{5/2} P_m(y)] = A_m T_{m+3}(y) / sqrt(y^2-1)`
/// and `k_m` the leading coefficient of `P_m^{(5/2,5/2)}`.
pub fn reconciled_mode_weight(m: usize) -> f64 {
    // k_m = (2m+5)! / (2^m m! (m+5)!)
    let ln_k = ln_factorial(2 * m + 5) - m as f64 * std::f64::consts::LN_2 - ln_factorial(m) - ln_factorial(m + 5);
    let mf = m as f64;
    let ln_a = ln_k + ((mf + 3.0) * (mf + 4.0) * (mf + 5.0)).ln() - (mf + 2.0) * std::f64::consts::LN_2;
    let two_pi3 = (2.0 * std::f64::consts::PI).powi(3);
    (ln_a + jacobi_at_one(m, FIBER_ALPHA).ln() - jacobi_norm_sq(m).ln()).exp() / two_pi3
}

/// Weight of mode `m` in the second representation, excluding the `r`
/// prefactor.
fn ln_mode_weight(m: usize, weights: Rep2Weights, mode: SeriesMode) -> f64 {
    match weights {
        Rep2Weights::Printed => 2f64.ln(),
        Rep2Weights::Reconciled => {
            let conv = ln_spectral_coeff(0, mode) - ln_spectral_coeff(0, SeriesMode::Normalized);
            (6.0 / std::f64::consts::PI.powi(4) * s7_harmonic_dim(m)).ln() + conv
        }
    }
}

fn r_prefactor(r: f64, weights: Rep2Weights) -> f64 {
    match weights {
        Rep2Weights::Printed => 1.0,
        Rep2Weights::Reconciled => r.cosh().powi(-3),
    }
}

/// `ln((1 + e^{-2x}) / 2) + x = ln cosh x` for `x >= 0`.
#[inline]
fn ln_cosh(x: f64) -> f64 {
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// Nodes of the `u` integration on `[0, u_max]`.
pub(crate) fn u_nodes(u_max: f64, q: &QuadratureSpec, order: usize) -> Vec<(f64, f64)> {
    composite_nodes(0.0, u_max, q.panel_width, order)
}

/// Refines `eval` on `[0, u_max]` until node doubling agrees to `tol` and the
/// integrand envelope at `u_max` is negligible.
fn integrate_half_line<E, V>(
    t: f64,
    r: f64,
    q: &QuadratureSpec,
    mut eval: E,
    envelope: V,
) -> Result<KernelResult>
where
    E: FnMut(&[(f64, f64)]) -> Result<(f64, usize)>,
    V: Fn(f64, usize) -> f64,
{
    q.validate()?;
    let mut u_max = q.u_max.unwrap_or_else(|| QuadratureSpec::default_u_max(t, r));
    let mut order = q.n_u;
    let mut last_err = f64::INFINITY;
    for _ in 0..=q.max_refinements {
        let (coarse, _) = eval(&u_nodes(u_max, q, order))?;
        let (fine, m_used) = eval(&u_nodes(u_max, q, 2 * order))?;
        let est = (fine - coarse).abs();
        let tail = [0.0, 0.25, 0.5]
            .iter()
            .map(|d| envelope(u_max - d, m_used))
            .fold(0.0, f64::max);
        let scale = fine.abs();
        last_err = est + tail;
        let tail_ok = tail <= q.tol * scale;
        let nodes_ok = est <= q.tol * scale;
        if tail_ok && nodes_ok {
            return Ok(KernelResult {
                value: fine,
                est_error: est + tail,
                m_used,
                u_max_used: u_max,
            });
        }
        if !tail_ok {
            u_max *= 2.0;
        }
        if !nodes_ok {
            order *= 2;
        }
    }
    Err(Error::QuadratureNonConvergence {
        est_error: last_err,
        tol: q.tol,
        refinements: q.max_refinements,
    })
}

fn check_time(pt: &KernelPoint) -> Result<()> {
    pt.validate()?;
    if pt.t < MIN_TIME {
        return Err(domain(format!(
            "t = {} below the supported floor {MIN_TIME}",
            pt.t
        )));
    }
    Ok(())
}

/// Precomputed fiber data for a fixed `eta`.
pub(crate) struct FiberWeights {
    pub weights: Vec<f64>,
    pub ln_coeffs: Vec<f64>,
}

impl FiberWeights {
    pub fn new(eta: f64, ctrl: &SeriesControl) -> Self {
        FiberWeights {
            weights: jacobi_scaled_all(ctrl.m_cap, FIBER_ALPHA, FIBER_ALPHA, eta.cos(), 1.0),
            ln_coeffs: (0..=ctrl.m_cap).map(|m| ln_spectral_coeff(m, ctrl.mode)).collect(),
        }
    }
}

/// `s_t(eta, i u) q_{t,15}(cosh r cosh u) sinh^6 u`.
fn rep1_integrand(t: f64, r: f64, u: f64, fw: &FiberWeights, ctrl: &SeriesControl) -> Result<(f64, usize)> {
    let (s, m, _) = continued_series(t, u.cosh(), &fw.weights, &fw.ln_coeffs, ctrl)?;
    let qv = q_at_cosh_scaled(7, t, r, u);
    let sh = u.sinh();
    if sh == 0.0 || s.mant == 0.0 || qv.mant == 0.0 {
        return Ok((0.0, m));
    }
    let log = s.log + qv.log + 6.0 * sh.ln();
    Ok((s.mant * qv.mant * log.exp(), m))
}

/// First representation on a fixed set of `u` nodes.
pub(crate) fn rep1_on_nodes(
    t: f64,
    r: f64,
    fw: &FiberWeights,
    nodes: &[(f64, f64)],
    ctrl: &SeriesControl,
) -> Result<(f64, usize)> {
    let mut acc = 0.0;
    let mut m_used = 0;
    for &(u, w) in nodes {
        let (v, m) = rep1_integrand(t, r, u, fw, ctrl)?;
        acc += w * v;
        m_used = m_used.max(m);
    }
    Ok((acc, m_used))
}

/// `p_t(r, eta) = int_0^inf s_t(eta, i u) q_{t,15}(cosh r cosh u) sinh^6 u du`.
pub fn p_rep1(pt: &KernelPoint, q: &QuadratureSpec, ctrl: &SeriesControl) -> Result<KernelResult> {
    check_time(pt)?;
    ctrl.validate()?;
    let fw = FiberWeights::new(pt.eta, ctrl);
    integrate_half_line(
        pt.t,
        pt.r,
        q,
        |nodes| rep1_on_nodes(pt.t, pt.r, &fw, nodes, ctrl),
        |u, _| {
            rep1_integrand(pt.t, pt.r, u, &fw, ctrl)
                .map(|(v, _)| v.abs())
                .unwrap_or(f64::INFINITY)
        },
    )
}

/// Per-point data for the second representation.
pub(crate) struct Rep2Setup {
    t: f64,
    r: f64,
    pref: f64,
    /// `ln(weight_m) - (m(m+6) + 33) t`
    ln_w: Vec<f64>,
    h: Vec<f64>,
}

impl Rep2Setup {
    pub fn new(pt: &KernelPoint, ctrl: &SeriesControl, weights: Rep2Weights) -> Result<Self> {
        let mut ln_w = Vec::new();
        let mut h = Vec::new();
        for m in 0..=ctrl.m_cap {
            ln_w.push(ln_mode_weight(m, weights, ctrl.mode) - (eigenvalue(m) + MODE_SHIFT) * pt.t);
            h.push(h_m(m, pt.eta)?);
        }
        Ok(Rep2Setup {
            t: pt.t,
            r: pt.r,
            pref: r_prefactor(pt.r, weights),
            ln_w,
            h,
        })
    }

    /// Mode contributions `weight_m e^{...} h_m int cosh((m+3)u) q_9 du` on
    /// fixed nodes; stops once the contributions have peaked and fall below
    /// `tol` of the largest one.
    pub fn mode_sum(&self, nodes: &[(f64, f64)], ctrl: &SeriesControl) -> Result<(f64, usize)> {
        let qs: Vec<(f64, Scaled)> = nodes
            .iter()
            .map(|&(u, _)| (u, q_at_cosh_scaled(4, self.t, self.r, u)))
            .collect();
        let mut total = 0.0;
        let mut max_mag = 0.0f64;
        let mut prev = f64::INFINITY;
        for m in 0..self.ln_w.len() {
            let k = (m + 3) as f64;
            let mut i_m = 0.0;
            for (&(_, w), (u, qv)) in nodes.iter().zip(&qs) {
                if qv.mant == 0.0 {
                    continue;
                }
                i_m += w * qv.mant * (self.ln_w[m] + ln_cosh(k * u) + qv.log).exp();
            }
            let mag = i_m.abs();
            total += self.h[m] * i_m;
            max_mag = max_mag.max(mag);
            if m > 0 && mag < prev && mag <= ctrl.tol * max_mag {
                return Ok((self.pref * total, m));
            }
            prev = mag;
        }
        Err(Error::SeriesNonConvergence {
            m_cap: self.ln_w.len() - 1,
            tail: prev / max_mag,
        })
    }

    /// `sum_m |weight_m| e^{...} cosh((m+3)u) q_9(cosh r cosh u)` for `m <= m_max`.
    pub fn envelope(&self, u: f64, m_max: usize) -> f64 {
        let qv = q_at_cosh_scaled(4, self.t, self.r, u);
        if qv.mant == 0.0 {
            return 0.0;
        }
        let s: f64 = (0..=m_max.min(self.ln_w.len() - 1))
            .map(|m| (self.ln_w[m] + ln_cosh((m + 3) as f64 * u) + qv.log).exp())
            .sum();
        self.pref * s * qv.mant.abs()
    }

    /// `int_{-1}^{1} G_t(eta, x, u) q_9 (1 - x^2)^2 dx` with `G_t` summed per node.
    pub fn direct_slice(
        &self,
        eta: f64,
        u: f64,
        gl: &GaussLegendre,
        ctrl: &SeriesControl,
    ) -> Result<(Complex64, usize)> {
        let qv = q_at_cosh_scaled(4, self.t, self.r, u);
        if qv.mant == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0));
        }
        let (c, s) = (eta.cos(), eta.sin());
        let ln_tol = ctrl.tol.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut m_used = 0;
        for (&x, &wx) in gl.nodes.iter().zip(&gl.weights) {
            let z = Complex64::new(c, s * x);
            let ln_abs_z = z.norm().ln();
            let mut zm = Complex64::new(1.0, 0.0);
            let mut g = Complex64::new(0.0, 0.0);
            let mut max_ln = f64::NEG_INFINITY;
            let mut prev_ln = f64::INFINITY;
            let mut done = false;
            for m in 0..self.ln_w.len() {
                let e = self.ln_w[m] + ln_cosh((m + 3) as f64 * u) + qv.log;
                g += zm * e.exp();
                let ln_mag = e + m as f64 * ln_abs_z;
                max_ln = max_ln.max(ln_mag);
                if m > 0 && ln_mag < prev_ln && ln_mag < max_ln + ln_tol {
                    m_used = m_used.max(m);
                    done = true;
                    break;
                }
                prev_ln = ln_mag;
                zm *= z;
            }
            if !done {
                return Err(Error::SeriesNonConvergence {
                    m_cap: self.ln_w.len() - 1,
                    tail: (prev_ln - max_ln).exp(),
                });
            }
            acc += g * (wx * (1.0 - x * x) * (1.0 - x * x));
        }
        // 15/8 from G_t; the (6/pi^4) d_m or 2 weights already carry 16/15 * 15/8
        Ok((acc * (15.0 / 16.0) * qv.mant * self.pref, m_used))
    }
}

fn rep2_direct_on_nodes(
    setup: &Rep2Setup,
    eta: f64,
    nodes: &[(f64, f64)],
    gl: &GaussLegendre,
    ctrl: &SeriesControl,
) -> Result<(f64, usize)> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs_acc = 0.0;
    let mut m_used = 0;
    for &(u, w) in nodes {
        let (v, m) = setup.direct_slice(eta, u, gl, ctrl)?;
        acc += v * w;
        abs_acc += (v * w).norm();
        m_used = m_used.max(m);
    }
    if acc.im.abs() > 1e-10 * abs_acc.max(acc.re.abs()) {
        return Err(Error::ImaginaryResidue(acc.im / abs_acc));
    }
    Ok((acc.re, m_used))
}

/// Second representation of `p_t(r, eta)`.
pub fn p_rep2(
    pt: &KernelPoint,
    q: &QuadratureSpec,
    ctrl: &SeriesControl,
    path: Rep2Path,
) -> Result<KernelResult> {
    p_rep2_weighted(pt, q, ctrl, path, Rep2Weights::Reconciled)
}

/// [`p_rep2`] with an explicit choice of mode weights.
pub fn p_rep2_weighted(
    pt: &KernelPoint,
    q: &QuadratureSpec,
    ctrl: &SeriesControl,
    path: Rep2Path,
    weights: Rep2Weights,
) -> Result<KernelResult> {
    check_time(pt)?;
    ctrl.validate()?;
    let setup = Rep2Setup::new(pt, ctrl, weights)?;
    match path {
        Rep2Path::ModeSeries => integrate_half_line(
            pt.t,
            pt.r,
            q,
            |nodes| setup.mode_sum(nodes, ctrl),
            |u, m| setup.envelope(u, m),
        ),
        Rep2Path::Direct2d => {
            let gl = GaussLegendre::cached(q.n_phi);
            integrate_half_line(
                pt.t,
                pt.r,
                q,
                |nodes| rep2_direct_on_nodes(&setup, pt.eta, nodes, &gl, ctrl),
                |u, _| {
                    setup
                        .direct_slice(pt.eta, u, &gl, ctrl)
                        .map(|(v, _)| v.norm())
                        .unwrap_or(f64::INFINITY)
                },
            )
        }
    }
}

/// `G_t(eta, phi, u)` summed directly (with the given weights, without the
/// `1/cosh^3 r` factor).
pub fn g_series(
    t: f64,
    eta: f64,
    phi: f64,
    u: f64,
    ctrl: &SeriesControl,
    weights: Rep2Weights,
) -> Result<Complex64> {
    let z = Complex64::new(eta.cos(), eta.sin() * phi.cos());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zm = Complex64::new(1.0, 0.0);
    let mut max_mag = 0.0f64;
    for m in 0..=ctrl.m_cap {
        let ln_w = ln_mode_weight(m, weights, ctrl.mode) - (eigenvalue(m) + MODE_SHIFT) * t;
        // weight carries 2 = (15/8)(16/15); G_t itself carries 15/8
        let term = zm * ((ln_w + ln_cosh((m + 3) as f64 * u)).exp() * 15.0 / 16.0);
        acc += term;
        let mag = term.norm();
        max_mag = max_mag.max(mag);
        if m > 0 && mag <= ctrl.tol * max_mag {
            return Ok(acc);
        }
        zm *= z;
    }
    Err(Error::SeriesNonConvergence { m_cap: ctrl.m_cap, tail: 0.0 })
}

/// The kernel with a choice of representation, as used by validation code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Rep1,
    Rep2,
}

/// A frozen evaluation plan: fixed nodes and series settings so that nearby
/// evaluations (finite-difference stencils) differ only by the integrand.
#[derive(Debug, Clone)]
pub struct FrozenPlan {
    pub which: Representation,
    pub nodes: Vec<(f64, f64)>,
    pub ctrl: SeriesControl,
}

impl FrozenPlan {
    /// Resolves `u_max` and the node order at `pt`, adds headroom, and
    /// freezes them.
    pub fn at(which: Representation, pt: &KernelPoint, q: &QuadratureSpec, ctrl: &SeriesControl) -> Result<Self> {
        let res = match which {
            Representation::Rep1 => p_rep1(pt, q, ctrl)?,
            Representation::Rep2 => p_rep2(pt, q, ctrl, Rep2Path::ModeSeries)?,
        };
        let u_max = res.u_max_used + 2.0;
        Ok(FrozenPlan {
            which,
            nodes: u_nodes(u_max, q, 2 * q.n_u),
            ctrl: *ctrl,
        })
    }

    pub fn eval(&self, t: f64, r: f64, eta: f64) -> Result<f64> {
        match self.which {
            Representation::Rep1 => {
                let fw = FiberWeights::new(eta, &self.ctrl);
                Ok(rep1_on_nodes(t, r, &fw, &self.nodes, &self.ctrl)?.0)
            }
            Representation::Rep2 => {
                let pt = KernelPoint { t, r, eta };
                let setup = Rep2Setup::new(&pt, &self.ctrl, Rep2Weights::Reconciled)?;
                Ok(setup.mode_sum(&self.nodes, &self.ctrl)?.0)
            }
        }
    }
}
