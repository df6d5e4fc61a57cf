//! The radial sub-Laplacian by Richardson-extrapolated central differences,
//! and the heat-equation residual of the kernel.

use super::{FrozenPlan, KernelPoint, QuadratureSpec, Representation};
use crate::error::{domain, Result};
use crate::fiber::SeriesControl;

/// Width of the excluded strips at `r = 0`, `eta = 0` and `eta = pi`, where
/// the operator coefficients are singular.
pub const BOUNDARY_STRIP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub h_r: f64,
    pub h_eta: f64,
    /// Time step relative to `t`.
    pub h_t_rel: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps {
            h_r: 1e-3,
            h_eta: 1e-3,
            h_t_rel: 1e-3,
        }
    }
}

/// `(4 D(h/2) - D(h)) / 3` for first and second central differences.
fn richardson<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64, fx: f64) -> Result<(f64, f64)> {
    let (p1, m1) = (f(x + h)?, f(x - h)?);
    let (p2, m2) = (f(x + 0.5 * h)?, f(x - 0.5 * h)?);
    let d1 = |p: f64, m: f64, h: f64| (p - m) / (2.0 * h);
    let d2 = |p: f64, m: f64, h: f64| (p - 2.0 * fx + m) / (h * h);
    let first = (4.0 * d1(p2, m2, 0.5 * h) - d1(p1, m1, h)) / 3.0;
    let second = (4.0 * d2(p2, m2, 0.5 * h) - d2(p1, m1, h)) / 3.0;
    Ok((first, second))
}

fn check_interior(r: f64, eta: f64) -> Result<()> {
    use std::f64::consts::PI;
    if r < BOUNDARY_STRIP || !(BOUNDARY_STRIP..=PI - BOUNDARY_STRIP).contains(&eta) {
        return Err(domain(format!(
            "(r, eta) = ({r}, {eta}) lies in the boundary strip of width {BOUNDARY_STRIP}"
        )));
    }
    Ok(())
}

/// `L f = f_rr + (7 coth r + 7 tanh r) f_r + tanh^2 r (f_ee + 6 cot eta f_e)`.
pub fn apply_radial_sublaplacian<F>(f: F, r: f64, eta: f64, steps: &FdSteps) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    check_interior(r, eta)?;
    let f0 = f(r, eta)?;
    let (fr, frr) = richardson(|x| f(x, eta), r, steps.h_r, f0)?;
    let (fe, fee) = richardson(|y| f(r, y), eta, steps.h_eta, f0)?;
    let th = r.tanh();
    Ok(frr + 7.0 * (1.0 / th + th) * fr + th * th * (fee + 6.0 * fe / eta.tan()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub dt: f64,
    pub lp: f64,
    /// `dt - lp`
    pub residual: f64,
    /// `max(|dt|, |lp|)`
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        self.residual.abs() / self.scale
    }
}

/// `(d/dt - L) p` at `pt`, with every stencil point evaluated on the nodes
/// resolved at `pt`.
pub fn heat_residual(
    which: Representation,
    pt: &KernelPoint,
    q: &QuadratureSpec,
    ctrl: &SeriesControl,
    steps: &FdSteps,
) -> Result<Residual> {
    check_interior(pt.r, pt.eta)?;
    let plan = FrozenPlan::at(which, pt, q, ctrl)?;
    let p0 = plan.eval(pt.t, pt.r, pt.eta)?;
    let (dt, _) = richardson(|t| plan.eval(t, pt.r, pt.eta), pt.t, steps.h_t_rel * pt.t, p0)?;
    let lp = apply_radial_sublaplacian(|r, e| plan.eval(pt.t, r, e), pt.r, pt.eta, steps)?;
    Ok(Residual {
        dt,
        lp,
        residual: dt - lp,
        scale: dt.abs().max(lp.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_on_radial_eigenfunction() {
        // L (cosh r cos eta) = 8 cosh r cos eta
        let f = |r: f64, e: f64| Ok(r.cosh() * e.cos());
        let (r, e) = (0.9, 1.1);
        let v = apply_radial_sublaplacian(f, r, e, &FdSteps::default()).unwrap();
        assert!((v - 8.0 * r.cosh() * e.cos()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn strip_rejected() {
        let f = |_: f64, _: f64| Ok(1.0);
        let s = FdSteps::default();
        assert!(apply_radial_sublaplacian(f, 0.1, 1.0, &s).is_err());
        assert!(apply_radial_sublaplacian(f, 1.0, 0.1, &s).is_err());
        assert!(apply_radial_sublaplacian(f, 1.0, 3.0, &s).is_err());
        assert_eq!(apply_radial_sublaplacian(f, 1.0, 1.0, &s).unwrap(), 0.0);
    }
}
