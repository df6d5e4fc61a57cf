//! Self-checks behind `fiber --check`, `hyperbolic --check` and
//! `octonion-check`. Each produces rows `check,case,value,bound,pass`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use octads::fiber::{fiber_heat_kernel, h_m, SeriesControl};
use octads::hyperbolic::{hyperbolic_heat_kernel, hyperbolic_kernel_scaled};
use octads::octonion::{cyl_to_ads, CylCoord, Octonion, EPSILON_TRIPLES};
use octads::quadrature::{composite, GaussLegendre};
use octads::special::{hyp2f1_terminating, jacobi_norm_sq, jacobi_poly, JacobiIndex};

use crate::records::{Cell, Table};

pub const CHECK_COLUMNS: &[&str] = &["check", "case", "value", "bound", "pass"];

pub struct Checks {
    pub table: Table,
    pub passed: bool,
}

impl Checks {
    pub fn new() -> Self {
        Checks {
            table: Table::new(CHECK_COLUMNS),
            passed: true,
        }
    }

    pub fn record(&mut self, check: &str, case: String, value: f64, bound: f64) {
        let ok = value <= bound;
        self.passed &= ok;
        self.table.push(vec![check.into(), Cell::Text(case), value.into(), bound.into(), ok.into()]);
    }
}

/// `2F1(m+3, -m-3; 1/2; (1 - cosh u)/2)` against `cosh((m+3)u)`.
pub fn chebyshev(out: &mut Checks) {
    for m in 0..=30 {
        let mut worst = 0.0f64;
        for k in 0..=40 {
            let u = 5.0 * k as f64 / 40.0;
            let exact = ((m + 3) as f64 * u).cosh();
            worst = worst.max((hyp2f1_terminating(m, u.cosh()) - exact).abs() / exact);
        }
        out.record("chebyshev", format!("m={m}"), worst, 1e-10);
    }
}

/// Orthogonality of `P_m^{(5/2,5/2)}(cos eta)` under `sin^6 eta` and the
/// unit mass of `s_t(eta, .)`.
pub fn jacobi(ts: &[f64], ctrl: &SeriesControl, out: &mut Checks) -> octads::Result<()> {
    let gl = GaussLegendre::new(200);
    let nodes: Vec<(f64, f64)> = gl.mapped(0.0, PI).collect();
    for m in 0..=10 {
        let mut worst = 0.0f64;
        for n in 0..=10 {
            if n == m {
                continue;
            }
            let v: f64 = nodes
                .iter()
                .map(|&(x, w)| {
                    w * jacobi_poly(JacobiIndex::fiber(m), x.cos())
                        * jacobi_poly(JacobiIndex::fiber(n), x.cos())
                        * x.sin().powi(6)
                })
                .sum();
            worst = worst.max(v.abs() / jacobi_norm_sq(m));
        }
        out.record("orthogonality", format!("m={m}"), worst, 1e-8);
    }
    for &t in ts {
        let mut worst = 0.0f64;
        for &eta in &[0.0, 0.9, PI / 2.0, 2.5, PI] {
            let mut acc = 0.0;
            for &(u, w) in &nodes {
                acc += w * fiber_heat_kernel(t, eta, u, false, ctrl)?.value * u.sin().powi(6);
            }
            worst = worst.max((acc - 1.0).abs());
        }
        out.record("fiber_mass", format!("t={t}"), worst, 1e-8);
    }
    Ok(())
}

/// `h_m(eta)` against `P_m(cos eta) / P_m(1)`.
pub fn profile(out: &mut Checks) -> octads::Result<()> {
    for m in 0..=15 {
        let p1 = jacobi_poly(JacobiIndex::fiber(m), 1.0);
        let mut worst = 0.0f64;
        for k in 0..=32 {
            let eta = PI * k as f64 / 32.0;
            let exact = jacobi_poly(JacobiIndex::fiber(m), eta.cos()) / p1;
            worst = worst.max((h_m(m, eta)? - exact).abs());
        }
        out.record("profile", format!("m={m}"), worst, 1e-10);
    }
    Ok(())
}

fn sphere_area(dim: usize) -> f64 {
    // |S^dim| = 2 pi^{(dim+1)/2} / Gamma((dim+1)/2)
    let a = (dim + 1) as f64 / 2.0;
    2.0 * PI.powf(a) / gamma_half_integer(a)
}

/// Gamma at integer and half-integer arguments.
fn gamma_half_integer(a: f64) -> f64 {
    let mut g = if a.fract() == 0.0 { 1.0 } else { PI.sqrt() };
    let mut x = if a.fract() == 0.0 { 1.0 } else { 0.5 };
    while x < a - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Normalisation, radial heat equation and the `n = 3` closed form.
pub fn hyperbolic(ns: &[usize], ts: &[f64], out: &mut Checks) -> octads::Result<()> {
    for &n in ns {
        let area = sphere_area(n - 1);
        for &t in ts {
            let s_max = (n - 1) as f64 * t + 20.0 * t.sqrt() + 5.0;
            let mut f = |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                let q = hyperbolic_kernel_scaled(n, t, s).expect("valid kernel arguments");
                q.mant * (q.log + (n - 1) as f64 * s.sinh().ln()).exp()
            };
            let mass = area * composite(0.0, s_max, 0.5, 24, &mut f);
            out.record("hyperbolic_mass", format!("n={n} t={t}"), (mass - 1.0).abs(), 1e-6);

            let mut worst = 0.0f64;
            for &s in &[0.5, 1.0, 2.0, 4.0] {
                let h = 1e-3;
                let q = |t: f64, s: f64| hyperbolic_heat_kernel(n, t, s);
                let q0 = q(t, s)?;
                let d = |h: f64| -> octads::Result<(f64, f64, f64)> {
                    let qs = (q(t, s + h)? - q(t, s - h)?) / (2.0 * h);
                    let qss = (q(t, s + h)? - 2.0 * q0 + q(t, s - h)?) / (h * h);
                    let ht = h * t;
                    let qt = (q(t + ht, s)? - q(t - ht, s)?) / (2.0 * ht);
                    Ok((qs, qss, qt))
                };
                let (a1, a2, a3) = d(h)?;
                let (b1, b2, b3) = d(0.5 * h)?;
                let rich = |a: f64, b: f64| (4.0 * b - a) / 3.0;
                let (qs, qss, qt) = (rich(a1, b1), rich(a2, b2), rich(a3, b3));
                let lq = qss + (n - 1) as f64 / s.tanh() * qs;
                worst = worst.max((qt - lq).abs() / qt.abs().max(lq.abs()));
            }
            out.record("hyperbolic_residual", format!("n={n} t={t}"), worst, 1e-5);
        }
    }
    let mut worst = 0.0f64;
    for &t in &[0.1f64, 0.5, 1.0, 2.0] {
        for k in 0..=40 {
            let s = 0.25 * k as f64;
            let ratio = if s == 0.0 { 1.0 } else { s / s.sinh() };
            let exact = (-t).exp() / (4.0 * PI * t).powf(1.5) * ratio * (-s * s / (4.0 * t)).exp();
            let v = hyperbolic_heat_kernel(3, t, s)?;
            worst = worst.max((v - exact).abs() / exact);
        }
    }
    out.record("closed_form_n3", "t<=2 s<=10".into(), worst, 1e-12);
    Ok(())
}

fn random_octonion(rng: &mut ChaCha8Rng) -> Octonion {
    Octonion(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

pub fn octonion(pairs: usize, seed: u64, out: &mut Checks) -> octads::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut norm, mut left, mut right, mut quadric) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..pairs {
        let x = random_octonion(&mut rng);
        let y = random_octonion(&mut rng);
        let nx = x.norm_sq();
        let ny = y.norm_sq();
        norm = norm.max(((x * y).norm_sq() - nx * ny).abs() / (nx * ny));
        let scale = nx * ny.sqrt();
        left = left.max((x * (x * y)).max_abs_diff(&((x * x) * y)) / scale);
        right = right.max(((y * x) * x).max_abs_diff(&(y * (x * x))) / scale);

        let rho = rng.random_range(0.0..0.95);
        let w = x.scale(rho / x.norm());
        let eta_len = rng.random_range(0.0..3.1);
        let th = random_octonion(&mut rng);
        let v = &th.0[1..];
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let theta: [f64; 7] = std::array::from_fn(|i| v[i] * eta_len / len);
        let p = cyl_to_ads(&CylCoord::new(w, theta)?)?;
        quadric = quadric.max((p.pseudo_norm() + 1.0).abs());
    }
    out.record("norm_multiplicative", format!("pairs={pairs}"), norm, 1e-12);
    out.record("left_alternative", format!("pairs={pairs}"), left, 1e-12);
    out.record("right_alternative", format!("pairs={pairs}"), right, 1e-12);
    out.record("quadric_membership", format!("points={pairs}"), quadric, 1e-12);
    for &(i, j, k) in &EPSILON_TRIPLES {
        let cyc = [(i, j, k), (j, k, i), (k, i, j)];
        let mut err = 0.0f64;
        for &(a, b, c) in &cyc {
            err = err.max((Octonion::basis(a) * Octonion::basis(b)).max_abs_diff(&Octonion::basis(c)));
            err = err.max((Octonion::basis(b) * Octonion::basis(a)).max_abs_diff(&(-Octonion::basis(c))));
        }
        out.record("generator_triple", format!("e{i}e{j}=e{k}"), err, 0.0);
    }
    Ok(())
}
