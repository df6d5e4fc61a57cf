//! Octonions, the quadric `AdS^15(O) = {(x, y) : |x|^2 - |y|^2 = -1}` and the
//! cylindrical coordinates `(w, theta)` used to parametrise it.
//!
//! Imaginary units multiply as `e_i e_j = -delta_ij e_0 + eps_ijk e_k`, where
//! `eps` is the completely antisymmetric symbol generated by [`EPSILON_TRIPLES`].

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, Error, Result};

/// Triples `ijk` with `eps_ijk = +1`. Every other non-zero entry follows by
/// antisymmetry.
pub const EPSILON_TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 3),
    (1, 4, 5),
    (1, 7, 6),
    (2, 4, 6),
    (2, 5, 7),
    (3, 4, 7),
    (3, 6, 5),
];

/// `MUL_TABLE[i][j] = (k, sign)` encodes `e_i e_j = sign * e_k`.
pub const MUL_TABLE: [[(usize, i8); 8]; 8] = build_table();

const fn build_table() -> [[(usize, i8); 8]; 8] {
    let mut t = [[(0usize, 0i8); 8]; 8];
    let mut i = 0;
    while i < 8 {
        t[0][i] = (i, 1);
        t[i][0] = (i, 1);
        i += 1;
    }
    let mut i = 1;
    while i < 8 {
        t[i][i] = (0, -1);
        i += 1;
    }
    let mut n = 0;
    while n < EPSILON_TRIPLES.len() {
        let (a, b, c) = EPSILON_TRIPLES[n];
        // cyclic permutations carry +1, transpositions -1
        t[a][b] = (c, 1);
        t[b][c] = (a, 1);
        t[c][a] = (b, 1);
        t[b][a] = (c, -1);
        t[c][b] = (a, -1);
        t[a][c] = (b, -1);
        n += 1;
    }
    t
}

/// An octonion `c_0 e_0 + ... + c_7 e_7`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ZERO: Octonion = Octonion([0.0; 8]);
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    pub fn new(c: [f64; 8]) -> Self {
        Octonion(c)
    }

    /// The basis element `e_i`.
    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Octonion(c)
    }

    pub fn scalar(a: f64) -> Self {
        Octonion::ONE.scale(a)
    }

    pub fn coeffs(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn re(&self) -> f64 {
        self.0[0]
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn conj(&self) -> Self {
        let mut c = self.0;
        for v in c.iter_mut().skip(1) {
            *v = -*v;
        }
        Octonion(c)
    }

    pub fn scale(&self, a: f64) -> Self {
        Octonion(self.0.map(|c| c * a))
    }

    /// `a^{-1} = conj(a) / |a|^2`.
    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_sq();
        if n2 == 0.0 {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    pub fn max_abs_diff(&self, other: &Octonion) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Bilinear octonion product driven by [`MUL_TABLE`].
pub fn oct_mul(a: &Octonion, b: &Octonion) -> Octonion {
    let mut out = [0.0; 8];
    for (i, &ai) in a.0.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.0.iter().enumerate() {
            let (k, s) = MUL_TABLE[i][j];
            out[k] += f64::from(s) * ai * bj;
        }
    }
    Octonion(out)
}

pub fn oct_inverse(a: &Octonion) -> Result<Octonion> {
    a.inverse()
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        oct_mul(&self, &rhs)
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(rhs.0) {
            *a += b;
        }
        Octonion(c)
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        self + (-rhs)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion(self.0.map(|c| -c))
    }
}

/// A point `(x, y)` of `O^2`; on the quadric when `pseudo_norm == -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdSPoint {
    pub x: Octonion,
    pub y: Octonion,
}

impl AdSPoint {
    /// `|x|^2 - |y|^2`.
    pub fn pseudo_norm(&self) -> f64 {
        self.x.norm_sq() - self.y.norm_sq()
    }
}

/// Cylindrical coordinates: `w` in the open unit ball of `O` and a tangent
/// vector `theta` at the pole of `S^7` with `|theta| < pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylCoord {
    pub w: Octonion,
    pub theta: [f64; 7],
}

impl CylCoord {
    pub fn new(w: Octonion, theta: [f64; 7]) -> Result<Self> {
        let c = CylCoord { w, theta };
        c.validate()?;
        Ok(c)
    }

    /// `rho = |w|`.
    pub fn rho(&self) -> f64 {
        self.w.norm()
    }

    /// `eta = |theta|`, the fiber distance from the pole.
    pub fn eta(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// Riemannian distance from the origin of `OH^1`, `r = atanh(rho)`.
    pub fn r(&self) -> f64 {
        self.rho().atanh()
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho() < 1.0) {
            return Err(domain(format!("|w| = {} must be < 1", self.rho())));
        }
        if !(self.eta() < std::f64::consts::PI) {
            return Err(domain(format!("|theta| = {} must be < pi", self.eta())));
        }
        Ok(())
    }
}

/// `sin(x)/x` with its removable singularity.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Round-sphere exponential at the pole `e_0` with frame `Y_i = e_i`.
pub fn sphere_exp(theta: &[f64; 7]) -> Octonion {
    let eta = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
    let s = sinc(eta);
    let mut c = [0.0; 8];
    c[0] = eta.cos();
    for (ci, ti) in c[1..].iter_mut().zip(theta) {
        *ci = s * ti;
    }
    Octonion(c)
}

/// `(w, theta) -> (g w, g) / sqrt(1 - rho^2)` with `g = exp_p(theta)`.
pub fn cyl_to_ads(c: &CylCoord) -> Result<AdSPoint> {
    c.validate()?;
    let rho2 = c.w.norm_sq();
    let g = sphere_exp(&c.theta);
    let k = 1.0 / (1.0 - rho2).sqrt();
    Ok(AdSPoint {
        x: oct_mul(&g, &c.w).scale(k),
        y: g.scale(k),
    })
}

/// The fibration map `(x, y) -> y^{-1} x`.
pub fn ads_project(p: &AdSPoint) -> Result<Octonion> {
    Ok(oct_mul(&p.y.inverse()?, &p.x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_triples() {
        for &(i, j, k) in &EPSILON_TRIPLES {
            let p = Octonion::basis(i) * Octonion::basis(j);
            assert_eq!(p, Octonion::basis(k), "e{i} e{j}");
            let q = Octonion::basis(j) * Octonion::basis(i);
            assert_eq!(q, -Octonion::basis(k));
        }
        assert_eq!(Octonion::basis(1) * Octonion::basis(2), Octonion::basis(3));
    }

    #[test]
    fn table_is_a_signed_permutation() {
        for row in MUL_TABLE.iter() {
            let mut seen = [false; 8];
            for &(k, s) in row {
                assert!(s == 1 || s == -1);
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        // 42 = 7 triples * 6 orderings carry a nonzero epsilon
        let n_eps = (1..8)
            .flat_map(|i| (1..8).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .count();
        assert_eq!(n_eps, 42);
    }

    #[test]
    fn identity_and_squares() {
        let x = Octonion::new([0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7, 0.2]);
        assert_eq!(Octonion::ONE * x, x);
        assert_eq!(x * Octonion::ONE, x);
        for i in 1..8 {
            assert_eq!(Octonion::basis(i) * Octonion::basis(i), -Octonion::ONE);
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Octonion::ONE.inverse().unwrap(), Octonion::ONE);
        assert_eq!(Octonion::basis(3).inverse().unwrap(), -Octonion::basis(3));
        assert_eq!(
            Octonion::scalar(2.0).inverse().unwrap(),
            Octonion::scalar(0.5)
        );
        assert_eq!(Octonion::ZERO.inverse(), Err(Error::ZeroDivisor));
    }

    #[test]
    fn non_associative_triple_exists() {
        let mut found = 0;
        for i in 1..8 {
            for j in 1..8 {
                for k in 1..8 {
                    let (a, b, c) = (Octonion::basis(i), Octonion::basis(j), Octonion::basis(k));
                    if ((a * b) * c).max_abs_diff(&(a * (b * c))) > 0.5 {
                        found += 1;
                    }
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn base_point_and_scalar_case() {
        let base = cyl_to_ads(&CylCoord::new(Octonion::ZERO, [0.0; 7]).unwrap()).unwrap();
        assert_eq!(base.x, Octonion::ZERO);
        assert_eq!(base.y, Octonion::ONE);
        assert_eq!(ads_project(&base).unwrap(), Octonion::ZERO);

        let c = CylCoord::new(Octonion::scalar(0.5), [0.0; 7]).unwrap();
        let p = cyl_to_ads(&c).unwrap();
        let k = 1.0 / 0.75f64.sqrt();
        assert!(p.x.max_abs_diff(&Octonion::scalar(0.5 * k)) < 1e-15);
        assert!(p.y.max_abs_diff(&Octonion::scalar(k)) < 1e-15);

        // (lambda e0, mu e0) with mu^2 - lambda^2 = 1
        let (lambda, mu) = (0.75f64, 1.25f64);
        let q = AdSPoint { x: Octonion::scalar(lambda), y: Octonion::scalar(mu) };
        assert!((q.pseudo_norm() + 1.0).abs() < 1e-15);
        let w = ads_project(&q).unwrap();
        assert!(w.max_abs_diff(&Octonion::scalar(lambda / mu)) < 1e-15);
    }

    #[test]
    fn coordinate_domain_errors() {
        assert!(CylCoord::new(Octonion::scalar(1.0), [0.0; 7]).is_err());
        let mut th = [0.0; 7];
        th[2] = std::f64::consts::PI;
        assert!(CylCoord::new(Octonion::ZERO, th).is_err());
        let bad = CylCoord { w: Octonion::scalar(2.0), theta: [0.0; 7] };
        assert!(cyl_to_ads(&bad).is_err());
    }

    #[test]
    fn sphere_exp_small_angle() {
        let mut th = [0.0; 7];
        th[0] = 1e-9;
        let g = sphere_exp(&th);
        assert!((g.norm() - 1.0).abs() < 1e-15);
        assert!((g.0[1] - 1e-9).abs() < 1e-24);
    }

    #[test]
    fn radial_coordinates() {
        let mut th = [0.0; 7];
        th[3] = 0.6;
        th[5] = 0.8;
        let c = CylCoord::new(Octonion::scalar(0.5), th).unwrap();
        assert!((c.eta() - 1.0).abs() < 1e-15);
        assert!((c.r() - 0.5f64.atanh()).abs() < 1e-15);
        // y_0 = cosh r cos eta on the quadric
        let p = cyl_to_ads(&c).unwrap();
        assert!((p.y.re() - c.r().cosh() * c.eta().cos()).abs() < 1e-14);
    }
}
