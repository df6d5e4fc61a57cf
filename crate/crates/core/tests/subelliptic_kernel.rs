mod common;

use common::{harmonic_dim, jacobi_explicit, simpson};
use octads::special::chebyshev_t;
use octads::subelliptic::*;
use octads::{SeriesControl, SeriesMode};
use proptest::prelude::*;
use std::f64::consts::PI;

/// `A_m = k_m (m+3)(m+4)(m+5) / 2^{m+2}`, `k_m = (2m+5)! / (2^m m! (m+5)!)`.
fn a_m(m: usize) -> f64 {
    let mut k = 1.0;
    for j in 1..=(2 * m + 5) {
        k *= j as f64;
    }
    for j in 1..=m {
        k /= j as f64;
    }
    for j in 1..=(m + 5) {
        k /= j as f64;
    }
    k /= 2f64.powi(m as i32);
    k * ((m + 3) * (m + 4) * (m + 5)) as f64 / 2f64.powi(m as i32 + 2)
}

#[test]
fn third_derivative_identity() {
    // d^3/dy^3 [(y^2-1)^{5/2} P_m(y)] = A_m T_{m+3}(y) / sqrt(y^2-1)
    for m in 0..=8 {
        for &y in &[1.3, 2.0] {
            let f = |x: f64| (x * x - 1.0).powf(2.5) * jacobi_explicit(m, 2.5, x);
            let d3 = |h: f64| (f(y + 2.0 * h) - 2.0 * f(y + h) + 2.0 * f(y - h) - f(y - 2.0 * h)) / (2.0 * h * h * h);
            let v = (4.0 * d3(1e-3) - d3(2e-3)) / 3.0;
            let exact = a_m(m) * chebyshev_t(m + 3, y) / (y * y - 1.0).sqrt();
            assert!((v - exact).abs() <= 1e-6 * exact.abs(), "m={m} y={y}: {v} vs {exact}");
        }
    }
}

#[test]
fn mode_weight_is_multiplicity() {
    for m in 0..=12 {
        let n_m = simpson(0.0, PI, 4000, |e| jacobi_explicit(m, 2.5, e.cos()).powi(2) * e.sin().powi(6));
        let w = a_m(m) * jacobi_explicit(m, 2.5, 1.0) / (n_m * (2.0 * PI).powi(3));
        let d = 6.0 * harmonic_dim(m) / PI.powi(4);
        assert!((w - d).abs() <= 1e-10 * d, "m={m}: {w} vs {d}");
        assert!((reconciled_mode_weight(m) - d).abs() <= 1e-12 * d);
    }
}

#[test]
fn printed_weights_are_not_a_constant_multiple() {
    let q = QuadratureSpec::default();
    let c = SeriesControl::default();
    let ratio = |t: f64, r: f64, eta: f64| {
        let p = KernelPoint::new(t, r, eta).unwrap();
        p_rep1(&p, &q, &c).unwrap().value
            / p_rep2_weighted(&p, &q, &c, Rep2Path::ModeSeries, Rep2Weights::Printed).unwrap().value
    };
    let base = ratio(1.0, 0.0, 0.0);
    let far = ratio(1.0, 1.0, PI / 2.0);
    assert!((far / base - 1.0).abs() > 0.1, "{base} {far}");
}

#[test]
fn constant_mode_doubles_both_representations() {
    let q = QuadratureSpec::default();
    let n = SeriesControl::default();
    let p = SeriesControl { mode: SeriesMode::PaperConstant, ..n };
    let pt = KernelPoint::new(0.7, 0.8, 1.0).unwrap();
    let a = p_rep1(&pt, &q, &n).unwrap().value;
    let b = p_rep1(&pt, &q, &p).unwrap().value;
    let c = p_rep2(&pt, &q, &p, Rep2Path::ModeSeries).unwrap().value;
    assert!((b / a - 2.0).abs() < 1e-9);
    assert!((c / a - 2.0).abs() < 1e-9);
}

#[test]
fn generating_series_integrates_to_mode_profiles() {
    // int_0^pi G_t sin^5 phi dphi = (15/8) sum_m w_m e^{...} cosh((m+3)u) (16/15) h_m
    let c = SeriesControl::default();
    let (t, eta, u) = (0.9, 1.1, 0.6);
    let direct = simpson(0.0, PI, 2000, |phi| {
        g_series(t, eta, phi, u, &c, Rep2Weights::Printed).unwrap().re * phi.sin().powi(5)
    });
    let modes: f64 = (0..40)
        .map(|m| {
            let e = (-((m * (m + 6)) as f64 + 33.0) * t).exp();
            2.0 * e * ((m + 3) as f64 * u).cosh() * octads::fiber::h_m(m, eta).unwrap()
        })
        .sum();
    assert!((direct - modes).abs() <= 1e-10 * modes.abs(), "{direct} vs {modes}");
}

#[test]
fn frozen_plan_reproduces_adaptive_value() {
    let q = QuadratureSpec::default();
    let c = SeriesControl::default();
    let pt = KernelPoint::new(1.0, 0.5, 1.2).unwrap();
    for which in [Representation::Rep1, Representation::Rep2] {
        let plan = FrozenPlan::at(which, &pt, &q, &c).unwrap();
        let v = plan.eval(pt.t, pt.r, pt.eta).unwrap();
        let a = p_rep1(&pt, &q, &c).unwrap().value;
        assert!((v - a).abs() <= 1e-10 * a);
    }
}

#[test]
fn heat_equation_off_grid() {
    let q = QuadratureSpec::default();
    let c = SeriesControl::default();
    let pt = KernelPoint::new(0.7, 1.4, 2.0).unwrap();
    let r = heat_residual(Representation::Rep1, &pt, &q, &c, &FdSteps::default()).unwrap();
    assert!(r.relative() < 1e-6, "{r:?}");
    assert!(heat_residual(Representation::Rep1, &KernelPoint::new(1.0, 0.1, 1.0).unwrap(), &q, &c, &FdSteps::default()).is_err());
}

#[test]
fn mass_and_first_moment() {
    let c = SeriesControl::default();
    let spec = MeasureSpec::default();
    let grid = KernelGrid::build(1.0, &spec, &c, 1).unwrap();
    let m = grid.integrate(|_, _| 1.0);
    // observed normalisation of the kernel against d mu
    assert!((m - 1.0 / 32.0).abs() < 1e-10, "{m}");
    let moment = grid.integrate(|r, e| r.cosh() * e.cos());
    assert!((moment / m - 8f64.exp()).abs() < 1e-8 * 8f64.exp());
    // a non-eigenfunction: P_2(cos eta) decays but is not an eigenfunction of L
    let (v, err) = weighted_integral(|_, e| e.cos().powi(2), 1.0, &spec, &c).unwrap();
    assert!(v > 0.0 && err < 1e-10);
}

#[test]
fn antipodal_fiber_value_is_the_limit() {
    // p is even in pi - eta, so extrapolate in (pi - eta)^2
    let q = QuadratureSpec::default();
    let c = SeriesControl::default();
    for &(t, r) in &[(0.5, 0.0), (1.0, 1.0), (2.0, 2.0)] {
        let p = |eta: f64| p_rep1(&KernelPoint::new(t, r, eta).unwrap(), &q, &c).unwrap().value;
        let d = 0.02;
        let limit = (4.0 * p(PI - d) - p(PI - 2.0 * d)) / 3.0;
        let at_pi = p(PI);
        assert!(at_pi.is_finite() && at_pi > 0.0);
        assert!((at_pi - limit).abs() <= 1e-6 * at_pi, "t={t} r={r}: {at_pi} vs {limit}");
    }
}

#[test]
fn rejects_bad_input() {
    let q = QuadratureSpec::default();
    let c = SeriesControl::default();
    assert!(KernelPoint::new(1.0, 0.0, -0.1).is_err());
    let p = KernelPoint::new(1.0, 0.0, 0.0).unwrap();
    assert!(p_rep1(&p, &QuadratureSpec { n_phi: 4, ..q }, &c).is_err());
    assert!(p_rep2(&p, &q, &SeriesControl { m_cap: 2, ..c }, Rep2Path::ModeSeries).is_err());
    assert!(total_mass(0.01, &MeasureSpec::default(), &c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn representations_agree(t in 0.3f64..2.5, r in 0.0f64..3.0, eta in 0.0f64..PI) {
        let q = QuadratureSpec::default();
        let c = SeriesControl::default();
        let p = KernelPoint::new(t, r, eta).unwrap();
        let a = p_rep1(&p, &q, &c).unwrap().value;
        let b = p_rep2(&p, &q, &c, Rep2Path::ModeSeries).unwrap().value;
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-8 * b, "{} vs {}", a, b);
    }
}
