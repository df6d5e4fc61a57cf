//! Euler–Maruyama simulation of the radial diffusion generated by
//!
//! ```text
//! L = d^2/dr^2 + (7 coth r + 7 tanh r) d/dr + tanh^2 r (d^2/d eta^2 + 6 cot eta d/d eta)
//! ```
//!
//! i.e. `dr = (7 coth r + 7 tanh r) dt + sqrt(2) dW1`,
//! `d eta = 6 tanh^2 r cot eta dt + sqrt(2) tanh r dW2`.
//!
//! Each path owns a ChaCha8 generator seeded from `seed` with stream
//! `64 * path + level`: level 0 draws the base increments over `dt`, level
//! `l >= 1` draws the Brownian-bridge midpoints that split them into `2^l`
//! substeps, and [`ADAPTIVE_STREAM`] feeds the extra bisections taken near
//! the singular boundaries. Runs at different `bridge_levels` therefore share
//! their Brownian paths, and results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Stream offset reserved for adaptive bisection.
pub const ADAPTIVE_STREAM: u64 = 63;
const MAX_ADAPTIVE_DEPTH: u32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct SdeConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub eps_r: f64,
    pub eps_eta: f64,
    pub seed: u64,
    pub t_end: f64,
    /// Each base step is split into `2^bridge_levels` substeps.
    pub bridge_levels: u32,
    /// Local step bound `h <= substep_eps * min(r^2, eta^2 / tanh^2 r, (pi - eta)^2 / tanh^2 r)`.
    pub substep_eps: f64,
}

impl Default for SdeConfig {
    fn default() -> Self {
        SdeConfig {
            n_paths: 100_000,
            dt: 1e-4,
            eps_r: 1e-3,
            eps_eta: 1e-3,
            seed: 20_240_601,
            t_end: 0.5,
            bridge_levels: 0,
            substep_eps: 0.05,
        }
    }
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_paths == 0 {
            return bad("n_paths must be >= 1");
        }
        if !(self.dt > 0.0 && self.dt <= 1e-3) {
            return bad("dt must lie in (0, 1e-3]");
        }
        for e in [self.eps_r, self.eps_eta] {
            if !(e > 0.0 && e <= 0.05) {
                return bad("reflection thresholds must lie in (0, 0.05]");
            }
        }
        if !(self.t_end > 0.0) {
            return bad("t_end must be > 0");
        }
        if self.bridge_levels > 20 {
            return bad("bridge_levels must be <= 20");
        }
        if !(self.substep_eps > 0.0) {
            return bad("substep_eps must be > 0");
        }
        Ok(())
    }

    fn base_steps(&self, t: f64) -> Result<usize> {
        let n = (t / self.dt).round();
        if !(n >= 1.0) || ((n * self.dt - t).abs() > 1e-9 * t) {
            return Err(Error::Config(format!(
                "time {t} is not a multiple of dt = {}",
                self.dt
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub r: f64,
    pub eta: f64,
}

struct Walker {
    r: f64,
    eta: f64,
    eps_r: f64,
    eps_eta: f64,
    substep_eps: f64,
    adaptive: ChaCha8Rng,
}

impl Walker {
    fn max_step(&self) -> f64 {
        let th2 = self.r.tanh().powi(2);
        let pi = std::f64::consts::PI;
        let a = self.eta.min(pi - self.eta);
        self.substep_eps * (self.r * self.r).min(a * a / th2)
    }

    /// One step of length `h` driven by increments `(w1, w2)`, bisected
    /// along a Brownian bridge while `h` exceeds the local bound.
    fn advance(&mut self, h: f64, w1: f64, w2: f64, depth: u32) {
        if depth < MAX_ADAPTIVE_DEPTH && h > self.max_step() {
            let sd = (0.25 * h).sqrt();
            let z1: f64 = self.adaptive.sample(StandardNormal);
            let z2: f64 = self.adaptive.sample(StandardNormal);
            let (a1, a2) = (0.5 * w1 + sd * z1, 0.5 * w2 + sd * z2);
            self.advance(0.5 * h, a1, a2, depth + 1);
            self.advance(0.5 * h, w1 - a1, w2 - a2, depth + 1);
            return;
        }
        self.euler(h, w1, w2);
    }

    fn euler(&mut self, h: f64, w1: f64, w2: f64) {
        let pi = std::f64::consts::PI;
        let th = self.r.tanh();
        let sq2 = std::f64::consts::SQRT_2;
        let mut r = self.r + 7.0 * (1.0 / th + th) * h + sq2 * w1;
        let mut eta = self.eta + 6.0 * th * th / self.eta.tan() * h + sq2 * th * w2;
        if r < self.eps_r {
            r = 2.0 * self.eps_r - r;
        }
        if eta < self.eps_eta {
            eta = 2.0 * self.eps_eta - eta;
        }
        if eta > pi - self.eps_eta {
            eta = 2.0 * (pi - self.eps_eta) - eta;
        }
        // a second overshoot can only come from an extreme increment
        self.r = r.max(self.eps_r);
        self.eta = eta.clamp(self.eps_eta, pi - self.eps_eta);
    }
}

fn stream_rng(seed: u64, path: usize, level: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64 * 64 + level);
    rng
}

/// Splits `(h, w)` into `2^levels` increments, consuming level `l` midpoints
/// from `rngs[l - 1]` in breadth-first order.
fn bridge_split(h: f64, w: (f64, f64), rngs: &mut [ChaCha8Rng], out: &mut Vec<(f64, f64)>) {
    out.clear();
    out.push(w);
    let mut hh = h;
    for rng in rngs.iter_mut() {
        let sd = (0.25 * hh).sqrt();
        let mut next = Vec::with_capacity(out.len() * 2);
        for &(w1, w2) in out.iter() {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            let a = (0.5 * w1 + sd * z1, 0.5 * w2 + sd * z2);
            next.push(a);
            next.push((w1 - a.0, w2 - a.1));
        }
        *out = next;
        hh *= 0.5;
    }
}

fn simulate_one(cfg: &SdeConfig, path: usize, record: &[usize]) -> Vec<PathSample> {
    let mut base = stream_rng(cfg.seed, path, 0);
    let mut bridges: Vec<ChaCha8Rng> = (1..=cfg.bridge_levels as u64)
        .map(|l| stream_rng(cfg.seed, path, l))
        .collect();
    let mut walker = Walker {
        r: cfg.eps_r,
        eta: cfg.eps_eta,
        eps_r: cfg.eps_r,
        eps_eta: cfg.eps_eta,
        substep_eps: cfg.substep_eps,
        adaptive: stream_rng(cfg.seed, path, ADAPTIVE_STREAM),
    };
    let sd = cfg.dt.sqrt();
    let h = cfg.dt / (1u64 << cfg.bridge_levels) as f64;
    let mut incs = Vec::new();
    let mut out = Vec::with_capacity(record.len());
    let mut next = 0;
    let last = *record.last().unwrap_or(&0);
    for step in 1..=last {
        let z1: f64 = base.sample(StandardNormal);
        let z2: f64 = base.sample(StandardNormal);
        bridge_split(cfg.dt, (sd * z1, sd * z2), &mut bridges, &mut incs);
        for &(w1, w2) in &incs {
            walker.advance(h, w1, w2, 0);
        }
        while next < record.len() && record[next] == step {
            out.push(PathSample { r: walker.r, eta: walker.eta });
            next += 1;
        }
    }
    out
}

/// Samples at each of `times` (ascending multiples of `dt`); the outer
/// vector follows `times`, the inner one the path index.
pub fn simulate_paths_at(cfg: &SdeConfig, times: &[f64]) -> Result<Vec<Vec<PathSample>>> {
    cfg.validate()?;
    let record: Vec<usize> = times.iter().map(|&t| cfg.base_steps(t)).collect::<Result<_>>()?;
    if record.is_empty() || record.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("record times must be non-empty and ascending".into()));
    }
    let per_path: Vec<Vec<PathSample>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|p| simulate_one(cfg, p, &record))
        .collect();
    Ok((0..record.len())
        .map(|i| per_path.iter().map(|v| v[i]).collect())
        .collect())
}

/// Samples at `cfg.t_end`, in path order.
pub fn simulate_paths(cfg: &SdeConfig) -> Result<Vec<PathSample>> {
    Ok(simulate_paths_at(cfg, &[cfg.t_end])?.remove(0))
}

/// Sample mean and standard error of `f`, summed in path order.
pub fn sample_expectation<F: Fn(&PathSample) -> f64>(samples: &[PathSample], f: F) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().map(&f).sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (f(s) - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulates `cfg` and returns the mean and standard error of `f` at `t_end`.
pub fn estimate_expectation<F: Fn(&PathSample) -> f64>(f: F, cfg: &SdeConfig) -> Result<(f64, f64)> {
    Ok(sample_expectation(&simulate_paths(cfg)?, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SdeConfig {
        SdeConfig {
            n_paths: 64,
            dt: 1e-3,
            t_end: 0.05,
            ..SdeConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(small().validate().is_ok());
        assert!(SdeConfig { dt: 2e-3, ..small() }.validate().is_err());
        assert!(SdeConfig { eps_r: 0.1, ..small() }.validate().is_err());
        assert!(SdeConfig { n_paths: 0, ..small() }.validate().is_err());
        assert!(simulate_paths(&SdeConfig { t_end: 0.0505, ..small() }).is_err());
    }

    #[test]
    fn constant_function() {
        let (m, se) = estimate_expectation(|_| 1.0, &small()).unwrap();
        assert_eq!((m, se), (1.0, 0.0));
    }

    #[test]
    fn samples_stay_in_domain() {
        let s = simulate_paths(&small()).unwrap();
        for p in s {
            assert!(p.r > 0.0);
            assert!(p.eta > 0.0 && p.eta < std::f64::consts::PI);
        }
    }

    #[test]
    fn replay_is_identical() {
        let a = simulate_paths(&small()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| simulate_paths(&small()).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn bridge_preserves_increment() {
        let mut rngs: Vec<ChaCha8Rng> = (1..=3).map(|l| stream_rng(7, 0, l)).collect();
        let mut out = Vec::new();
        bridge_split(1e-3, (0.01, -0.02), &mut rngs, &mut out);
        assert_eq!(out.len(), 8);
        let s1: f64 = out.iter().map(|w| w.0).sum();
        let s2: f64 = out.iter().map(|w| w.1).sum();
        assert!((s1 - 0.01).abs() < 1e-15 && (s2 + 0.02).abs() < 1e-15);
    }
}
