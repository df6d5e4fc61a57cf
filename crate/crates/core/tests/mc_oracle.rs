use octads::mc::*;
use octads::special::{jacobi_poly, JacobiIndex};

type Observable = fn(&PathSample) -> f64;

fn cfg(n_paths: usize) -> SdeConfig {
    SdeConfig {
        n_paths,
        dt: 1e-3,
        t_end: 0.5,
        ..SdeConfig::default()
    }
}

#[test]
fn halving_the_step_moves_means_by_less_than_one_stderr() {
    let base = cfg(20_000);
    let fine = SdeConfig { bridge_levels: 1, ..base.clone() };
    let a = simulate_paths(&base).unwrap();
    let b = simulate_paths(&fine).unwrap();
    let fs: [(&str, Observable); 3] = [
        ("cosh r cos eta", |p| p.r.cosh() * p.eta.cos()),
        ("P2", |p| jacobi_poly(JacobiIndex::fiber(2), p.eta.cos())),
        ("r", |p| p.r),
    ];
    for (name, f) in fs {
        let (ma, sa) = sample_expectation(&a, f);
        let (mb, sb) = sample_expectation(&b, f);
        assert!((ma - mb).abs() < sa.max(sb), "{name}: {ma} vs {mb} (stderr {sa})");
    }
}

#[test]
fn eigen_moment_at_half() {
    // E[cosh r cos eta] = e^{8t} from the start at the origin
    let s = simulate_paths(&cfg(20_000)).unwrap();
    let (m, se) = sample_expectation(&s, |p| p.r.cosh() * p.eta.cos());
    assert!((m - 4f64.exp()).abs() < 3.0 * se, "{m} +- {se}");
}

#[test]
fn thread_count_does_not_change_samples() {
    let c = cfg(500);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| simulate_paths_at(&c, &[0.25, 0.5]).unwrap());
    let b = four.install(|| simulate_paths_at(&c, &[0.25, 0.5]).unwrap());
    assert_eq!(a, b);
    let other = simulate_paths(&SdeConfig { seed: 1, ..c.clone() }).unwrap();
    assert_ne!(a[1], other);
}

#[test]
fn paths_leave_the_origin() {
    let s = simulate_paths(&cfg(2_000)).unwrap();
    assert!(s.iter().all(|p| p.r > 0.0));
    let mean_r = s.iter().map(|p| p.r).sum::<f64>() / s.len() as f64;
    // drift 7 coth r + 7 tanh r > 14 pushes r well past 7 by t = 0.5
    assert!(mean_r > 7.0, "{mean_r}");
}
