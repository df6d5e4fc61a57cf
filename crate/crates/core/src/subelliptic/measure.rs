//! Integrals of the kernel against the invariant measure
//! `(pi^7/90) sinh^7 r cosh^7 r sin^6 eta dr d eta`.

use rayon::prelude::*;

use super::{FiberWeights, MIN_TIME};
use crate::error::{domain, Error, Result};
use crate::fiber::{continued_series, SeriesControl};
use crate::hyperbolic::q_at_cosh_scaled;
use crate::quadrature::{composite_nodes, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec {
    /// Upper limit in `r`; `None` picks `14 t + 10 sqrt(t) + 2`.
    pub r_max: Option<f64>,
    /// Gauss–Legendre order per unit panel in `r` and `u`.
    pub n_r: usize,
    pub n_u: usize,
    /// Gauss–Legendre order on `[0, pi]`.
    pub n_eta: usize,
    /// Added to `r_max + 8 sqrt(t) + 2` for the `u` cut-off.
    pub u_extra: f64,
    /// Relative agreement required between the base and doubled grids.
    pub tol: f64,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec {
            r_max: None,
            n_r: 16,
            n_u: 16,
            n_eta: 48,
            u_extra: 4.0,
            tol: 1e-8,
        }
    }
}

impl MeasureSpec {
    pub fn r_max_for(&self, t: f64) -> f64 {
        self.r_max.unwrap_or(14.0 * t + 10.0 * t.sqrt() + 2.0)
    }
}

/// `p_t` times the measure density on a tensor grid of quadrature nodes.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    pub t: f64,
    /// `(node, weight)` in `r`.
    pub r: Vec<(f64, f64)>,
    /// `(node, weight)` in `eta`.
    pub eta: Vec<(f64, f64)>,
    /// Row-major in `r`: `p_t(r_i, eta_j) * density(r_i, eta_j)`.
    pub weighted: Vec<f64>,
    pub m_used: usize,
}

impl KernelGrid {
    /// Builds the grid with every node count multiplied by `refine`.
    pub fn build(t: f64, spec: &MeasureSpec, ctrl: &SeriesControl, refine: usize) -> Result<Self> {
        if !(t >= MIN_TIME) {
            return Err(domain(format!("t = {t} below the supported floor {MIN_TIME}")));
        }
        ctrl.validate()?;
        let r_max = spec.r_max_for(t);
        let u_max = r_max + 8.0 * t.sqrt() + 2.0 + spec.u_extra;
        let r_nodes = composite_nodes(0.0, r_max, 1.0, spec.n_r * refine);
        let u_nodes = composite_nodes(0.0, u_max, 1.0, spec.n_u * refine);
        let eta_nodes: Vec<(f64, f64)> = GaussLegendre::cached(spec.n_eta * refine)
            .mapped(0.0, std::f64::consts::PI)
            .collect();

        // s_t(eta_j, i u_k), rescaled per u_k by its largest magnitude over j
        let rows: Vec<Result<_>> = eta_nodes
            .par_iter()
            .map(|&(eta, _)| {
                let fw = FiberWeights::new(eta, ctrl);
                let mut row = Vec::with_capacity(u_nodes.len());
                let mut m_used = 0;
                for &(u, _) in &u_nodes {
                    let (s, m, _) = continued_series(t, u.cosh(), &fw.weights, &fw.ln_coeffs, ctrl)?;
                    m_used = m_used.max(m);
                    row.push((s.mant, s.log));
                }
                Ok((row, m_used))
            })
            .collect();
        let mut s_rows = Vec::with_capacity(rows.len());
        let mut m_used = 0;
        for row in rows {
            let (row, m) = row?;
            m_used = m_used.max(m);
            s_rows.push(row);
        }
        let nu = u_nodes.len();
        let log_k: Vec<f64> = (0..nu)
            .map(|k| {
                s_rows
                    .iter()
                    .filter(|row| row[k].0 != 0.0)
                    .map(|row| row[k].1)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let s_tilde: Vec<Vec<f64>> = s_rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&log_k)
                    .map(|(&(m, l), &lk)| if m == 0.0 { 0.0 } else { m * (l - lk).exp() })
                    .collect()
            })
            .collect();

        let ln_const = 7.0 * std::f64::consts::PI.ln() - 90f64.ln();
        let sin6: Vec<f64> = eta_nodes.iter().map(|&(e, _)| e.sin().powi(6)).collect();
        let weighted: Vec<Vec<f64>> = r_nodes
            .par_iter()
            .map(|&(r, _)| {
                let ln_dens = ln_const + 7.0 * r.sinh().ln() + 7.0 * r.cosh().ln();
                let b: Vec<f64> = u_nodes
                    .iter()
                    .zip(&log_k)
                    .map(|(&(u, w), &lk)| {
                        let qv = q_at_cosh_scaled(7, t, r, u);
                        if qv.mant == 0.0 || !lk.is_finite() {
                            return 0.0;
                        }
                        w * qv.mant * (qv.log + lk + 6.0 * u.sinh().ln() + ln_dens).exp()
                    })
                    .collect();
                s_tilde
                    .iter()
                    .zip(&sin6)
                    .map(|(row, s6)| s6 * row.iter().zip(&b).map(|(a, b)| a * b).sum::<f64>())
                    .collect()
            })
            .collect();
        Ok(KernelGrid {
            t,
            r: r_nodes,
            eta: eta_nodes,
            weighted: weighted.into_iter().flatten().collect(),
            m_used,
        })
    }

    /// `int f p_t d mu` on this grid.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let ne = self.eta.len();
        let mut acc = 0.0;
        for (i, &(r, wr)) in self.r.iter().enumerate() {
            let mut row = 0.0;
            for (j, &(e, we)) in self.eta.iter().enumerate() {
                row += we * f(r, e) * self.weighted[i * ne + j];
            }
            acc += wr * row;
        }
        acc
    }
}

/// `int f(r, eta) p_t(r, eta) d mu` with the error estimated by doubling every
/// node count. Returns `(value, est_error)`.
pub fn weighted_integral<F: Fn(f64, f64) -> f64>(
    f: F,
    t: f64,
    spec: &MeasureSpec,
    ctrl: &SeriesControl,
) -> Result<(f64, f64)> {
    let coarse = KernelGrid::build(t, spec, ctrl, 1)?.integrate(&f);
    let fine = KernelGrid::build(t, spec, ctrl, 2)?.integrate(&f);
    let est = (fine - coarse).abs();
    if est > spec.tol * fine.abs() {
        return Err(Error::QuadratureNonConvergence {
            est_error: est,
            tol: spec.tol,
            refinements: 1,
        });
    }
    Ok((fine, est))
}

/// `M(t) = int p_t d mu`.
pub fn total_mass(t: f64, spec: &MeasureSpec, ctrl: &SeriesControl) -> Result<(f64, f64)> {
    weighted_integral(|_, _| 1.0, t, spec, ctrl)
}
