//! One function per subcommand. Each returns a table plus a pass flag; the
//! caller turns the flag into the exit code.

use std::f64::consts::PI;

use rayon::prelude::*;

use octads::fiber::fiber_heat_kernel;
use octads::hyperbolic::{hyperbolic_heat_kernel, term_table};
use octads::mc::{sample_expectation, simulate_paths_at, PathSample, SdeConfig};
use octads::special::{jacobi_poly, JacobiIndex};
use octads::subelliptic::{
    heat_residual, p_rep1, p_rep2, p_rep2_weighted, FdSteps, KernelGrid, KernelPoint,
    KernelResult, MeasureSpec, QuadratureSpec, Rep2Path, Rep2Weights, Representation,
};
use octads::{Error, SeriesControl};

use crate::checks::{self, Checks};
use crate::records::{Cell, Table};

pub const DEFAULT_T: &[f64] = &[0.5, 1.0, 2.0];
pub const DEFAULT_R: &[f64] = &[0.0, 0.5, 1.0, 2.0];
pub const DEFAULT_ETA: &[f64] = &[0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];

pub enum Output {
    Table(Table),
    Text(String),
}

pub struct Outcome {
    pub output: Output,
    pub passed: bool,
    /// One-line summary for the error stream.
    pub summary: Option<String>,
}

impl Outcome {
    fn table(table: Table, passed: bool, summary: Option<String>) -> Self {
        Outcome {
            output: Output::Table(table),
            passed,
            summary,
        }
    }
}

pub struct Grid {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub eta: Vec<f64>,
}

impl Grid {
    pub fn points(&self) -> octads::Result<Vec<KernelPoint>> {
        let mut out = Vec::new();
        for &t in &self.t {
            for &r in &self.r {
                for &eta in &self.eta {
                    out.push(KernelPoint::new(t, r, eta)?);
                }
            }
        }
        Ok(out)
    }
}

/// Evaluates `f` on every point in parallel, keeping input order.
fn par_points<T, F>(points: &[KernelPoint], f: F) -> octads::Result<Vec<T>>
where
    T: Send,
    F: Fn(&KernelPoint) -> octads::Result<T> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    One,
    Two,
    Both,
}

impl std::str::FromStr for Rep {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" | "rep1" => Ok(Rep::One),
            "2" | "rep2" => Ok(Rep::Two),
            "both" => Ok(Rep::Both),
            other => Err(format!("unknown representation '{other}' (1, 2 or both)")),
        }
    }
}

pub fn parse_path(s: &str) -> Result<Rep2Path, String> {
    match s {
        "mode" | "mode-series" => Ok(Rep2Path::ModeSeries),
        "direct" | "direct-2d" => Ok(Rep2Path::Direct2d),
        other => Err(format!("unknown rep-2 path '{other}' (mode or direct)")),
    }
}

fn result_cells(p: &KernelPoint, k: &KernelResult) -> Vec<Cell> {
    vec![
        p.t.into(),
        p.r.into(),
        p.eta.into(),
        k.value.into(),
        k.est_error.into(),
        k.m_used.into(),
        k.u_max_used.into(),
    ]
}

pub fn eval(grid: &Grid, q: &QuadratureSpec, ctrl: &SeriesControl, rep: Rep, path: Rep2Path) -> octads::Result<Outcome> {
    let points = grid.points()?;
    match rep {
        Rep::One | Rep::Two => {
            let res = par_points(&points, |p| match rep {
                Rep::One => p_rep1(p, q, ctrl),
                _ => p_rep2(p, q, ctrl, path),
            })?;
            let mut table = Table::new(&["t", "r", "eta", "value", "est_error", "m_used", "u_max_used"]);
            for (p, k) in points.iter().zip(&res) {
                table.push(result_cells(p, k));
            }
            Ok(Outcome::table(table, true, None))
        }
        Rep::Both => {
            let res = par_points(&points, |p| Ok((p_rep1(p, q, ctrl)?, p_rep2(p, q, ctrl, path)?)))?;
            let mut table = Table::new(&[
                "t", "r", "eta", "rep1", "rep2", "rel_diff", "est_error", "m_used", "u_max_used",
            ]);
            for (p, (a, b)) in points.iter().zip(&res) {
                table.push(vec![
                    p.t.into(),
                    p.r.into(),
                    p.eta.into(),
                    a.value.into(),
                    b.value.into(),
                    rel_diff(a.value, b.value).into(),
                    a.est_error.max(b.est_error).into(),
                    a.m_used.max(b.m_used).into(),
                    a.u_max_used.max(b.u_max_used).into(),
                ]);
            }
            Ok(Outcome::table(table, true, None))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pair {
    /// First representation against the second (mode series).
    Reps,
    /// Direct double integral against the mode series.
    Paths,
    /// First representation against the bare printed weights; reports the ratio.
    Printed,
}

impl std::str::FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reps" => Ok(Pair::Reps),
            "paths" => Ok(Pair::Paths),
            "printed" => Ok(Pair::Printed),
            other => Err(format!("unknown pair '{other}' (reps, paths or printed)")),
        }
    }
}

pub fn compare_reps(
    grid: &Grid,
    q: &QuadratureSpec,
    ctrl: &SeriesControl,
    pair: Pair,
    tol: Option<f64>,
) -> octads::Result<Outcome> {
    let points = grid.points()?;
    let tol = tol.unwrap_or(match pair {
        Pair::Reps => 1e-6,
        Pair::Paths | Pair::Printed => 1e-8,
    });
    let vals = par_points(&points, |p| {
        Ok(match pair {
            Pair::Reps => (p_rep1(p, q, ctrl)?.value, p_rep2(p, q, ctrl, Rep2Path::ModeSeries)?.value),
            Pair::Paths => (
                p_rep2(p, q, ctrl, Rep2Path::Direct2d)?.value,
                p_rep2(p, q, ctrl, Rep2Path::ModeSeries)?.value,
            ),
            Pair::Printed => (
                p_rep1(p, q, ctrl)?.value,
                p_rep2_weighted(p, q, ctrl, Rep2Path::ModeSeries, Rep2Weights::Printed)?.value,
            ),
        })
    })?;
    let (ca, cb) = match pair {
        Pair::Reps => ("rep1", "rep2"),
        Pair::Paths => ("direct", "mode_series"),
        Pair::Printed => ("rep1", "rep2_printed"),
    };
    let mut table = Table::new(&["t", "r", "eta", ca, cb, "ratio", "rel_diff"]);
    let mut worst = 0.0f64;
    let ratios: Vec<f64> = vals.iter().map(|(a, b)| a / b).collect();
    let r0 = ratios.first().copied().unwrap_or(1.0);
    for ((p, (a, b)), ratio) in points.iter().zip(&vals).zip(&ratios) {
        let d = match pair {
            Pair::Printed => rel_diff(*ratio, r0),
            _ => rel_diff(*a, *b),
        };
        worst = worst.max(d);
        table.push(vec![
            p.t.into(),
            p.r.into(),
            p.eta.into(),
            (*a).into(),
            (*b).into(),
            (*ratio).into(),
            d.into(),
        ]);
    }
    let what = match pair {
        Pair::Printed => "max relative spread of the ratio",
        _ => "max relative difference",
    };
    Ok(Outcome::table(
        table,
        worst <= tol,
        Some(format!("{what}: {worst:.3e} (tolerance {tol:.1e})")),
    ))
}

pub fn residual(grid: &Grid, q: &QuadratureSpec, ctrl: &SeriesControl, steps: &FdSteps) -> octads::Result<Outcome> {
    let points = grid.points()?;
    let mut table = Table::new(&["rep", "t", "r", "eta", "dt", "lp", "residual", "bound", "pass"]);
    let mut ok = true;
    let mut worst = 0.0f64;
    for (name, which) in [("rep1", Representation::Rep1), ("rep2", Representation::Rep2)] {
        let res = par_points(&points, |p| heat_residual(which, p, q, ctrl, steps))?;
        for (p, r) in points.iter().zip(&res) {
            let bound = 1e-4 * r.dt.abs() + 1e-8;
            let pass = r.residual.abs() <= bound;
            ok &= pass;
            worst = worst.max(r.relative());
            table.push(vec![
                name.into(),
                p.t.into(),
                p.r.into(),
                p.eta.into(),
                r.dt.into(),
                r.lp.into(),
                r.residual.into(),
                bound.into(),
                pass.into(),
            ]);
        }
    }
    Ok(Outcome::table(
        table,
        ok,
        Some(format!("max |dt p - L p| / max(|dt p|, |L p|): {worst:.3e}")),
    ))
}

pub fn mass(ts: &[f64], spec: &MeasureSpec, ctrl: &SeriesControl) -> octads::Result<Outcome> {
    let mut table = Table::new(&["t", "mass", "est_error", "eigen_moment", "moment_ratio"]);
    let mut masses = Vec::new();
    let mut worst_moment = 0.0f64;
    for &t in ts {
        let coarse = KernelGrid::build(t, spec, ctrl, 1)?;
        let fine = KernelGrid::build(t, spec, ctrl, 2)?;
        let m = fine.integrate(|_, _| 1.0);
        let est = (m - coarse.integrate(|_, _| 1.0)).abs();
        let moment = fine.integrate(|r, e| r.cosh() * e.cos());
        let ratio = moment / (m * (8.0 * t).exp());
        worst_moment = worst_moment.max((ratio - 1.0).abs());
        masses.push(m);
        table.push(vec![t.into(), m.into(), est.into(), moment.into(), ratio.into()]);
    }
    let lo = masses.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = masses.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / hi.abs();
    Ok(Outcome::table(
        table,
        spread <= 1e-5 && worst_moment <= 1e-4,
        Some(format!(
            "mass spread {spread:.3e} (tolerance 1e-5), eigen-moment deviation {worst_moment:.3e} (tolerance 1e-4)"
        )),
    ))
}

pub type Observable = fn(f64, f64) -> f64;

/// The test functions compared in `mc-check`.
pub fn mc_functions() -> Vec<(&'static str, Observable)> {
    vec![
        ("cosh_r_cos_eta", |r, e| r.cosh() * e.cos()),
        ("jacobi2_cos_eta", |_, e| jacobi_poly(JacobiIndex::fiber(2), e.cos())),
        ("r", |r, _| r),
    ]
}

pub fn mc_check(ts: &[f64], sde: &SdeConfig, spec: &MeasureSpec, ctrl: &SeriesControl) -> octads::Result<Outcome> {
    let t_end = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cfg = SdeConfig { t_end, ..sde.clone() };
    let samples: Vec<Vec<PathSample>> = simulate_paths_at(&cfg, ts)?;
    let mut table = Table::new(&["function", "mc_mean", "stderr", "analytic", "z"]);
    let mut ok = true;
    let mut worst = 0.0f64;
    for (&t, s) in ts.iter().zip(&samples) {
        let grid = KernelGrid::build(t, spec, ctrl, 2)?;
        let m = grid.integrate(|_, _| 1.0);
        for (name, f) in mc_functions() {
            let analytic = grid.integrate(f) / m;
            let (mean, se) = sample_expectation(s, |p| f(p.r, p.eta));
            let z = (mean - analytic) / se;
            ok &= z.abs() <= 3.0;
            worst = worst.max(z.abs());
            table.push(vec![
                format!("{name}@t={t}").into(),
                mean.into(),
                se.into(),
                analytic.into(),
                z.into(),
            ]);
        }
    }
    Ok(Outcome::table(table, ok, Some(format!("max |z| = {worst:.2} (tolerance 3)"))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberCheck {
    Jacobi,
    Profile,
    Chebyshev,
}

impl std::str::FromStr for FiberCheck {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jacobi" => Ok(FiberCheck::Jacobi),
            "profile" => Ok(FiberCheck::Profile),
            "chebyshev" => Ok(FiberCheck::Chebyshev),
            other => Err(format!("unknown fiber check '{other}' (jacobi, profile or chebyshev)")),
        }
    }
}

pub fn fiber(
    ts: &[f64],
    etas: &[f64],
    us: &[f64],
    continued: bool,
    check: Option<FiberCheck>,
    ctrl: &SeriesControl,
) -> octads::Result<Outcome> {
    if let Some(c) = check {
        let mut out = Checks::new();
        match c {
            FiberCheck::Jacobi => checks::jacobi(ts, ctrl, &mut out)?,
            FiberCheck::Profile => checks::profile(&mut out)?,
            FiberCheck::Chebyshev => checks::chebyshev(&mut out),
        }
        return Ok(Outcome::table(out.table, out.passed, None));
    }
    let mut table = Table::new(&["t", "eta", "u", "value", "m_used", "tail_bound"]);
    for &t in ts {
        for &eta in etas {
            for &u in us {
                let v = fiber_heat_kernel(t, eta, u, continued, ctrl)?;
                table.push(vec![t.into(), eta.into(), u.into(), v.value.into(), v.m_used.into(), v.tail_bound.into()]);
            }
        }
    }
    Ok(Outcome::table(table, true, None))
}

pub fn hyperbolic(n: usize, ts: &[f64], ss: &[f64], dump_terms: bool, check: bool) -> octads::Result<Outcome> {
    if dump_terms {
        return Ok(Outcome {
            output: Output::Text(term_table(n)?),
            passed: true,
            summary: None,
        });
    }
    if check {
        let mut out = Checks::new();
        checks::hyperbolic(&[9, 15], ts, &mut out)?;
        return Ok(Outcome::table(out.table, out.passed, None));
    }
    let mut table = Table::new(&["n", "t", "s", "value"]);
    for &t in ts {
        for &s in ss {
            table.push(vec![n.into(), t.into(), s.into(), hyperbolic_heat_kernel(n, t, s)?.into()]);
        }
    }
    Ok(Outcome::table(table, true, None))
}

pub fn octonion_check(pairs: usize, seed: u64) -> octads::Result<Outcome> {
    if pairs == 0 {
        return Err(Error::Config("pairs must be >= 1".into()));
    }
    let mut out = Checks::new();
    checks::octonion(pairs, seed, &mut out)?;
    Ok(Outcome::table(out.table, out.passed, None))
}
