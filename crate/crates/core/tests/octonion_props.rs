use octads::octonion::*;
use proptest::prelude::*;

fn oct() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-2.0f64..2.0).prop_map(Octonion)
}

fn tangent() -> impl Strategy<Value = [f64; 7]> {
    (prop::array::uniform7(-1.0f64..1.0), 0.0f64..3.1).prop_map(|(v, len)| {
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-9);
        v.map(|a| a * len / n)
    })
}

/// The Fano-plane products, written out independently of the library table.
const PRODUCTS: [(usize, usize, usize); 21] = [
    (1, 2, 3), (2, 3, 1), (3, 1, 2),
    (1, 4, 5), (4, 5, 1), (5, 1, 4),
    (1, 7, 6), (7, 6, 1), (6, 1, 7),
    (2, 4, 6), (4, 6, 2), (6, 2, 4),
    (2, 5, 7), (5, 7, 2), (7, 2, 5),
    (3, 4, 7), (4, 7, 3), (7, 3, 4),
    (3, 6, 5), (6, 5, 3), (5, 3, 6),
];

#[test]
fn unit_products() {
    for &(i, j, k) in &PRODUCTS {
        assert_eq!(Octonion::basis(i) * Octonion::basis(j), Octonion::basis(k));
        assert_eq!(Octonion::basis(j) * Octonion::basis(i), -Octonion::basis(k));
    }
    for i in 1..8 {
        assert_eq!(Octonion::basis(i) * Octonion::basis(i), -Octonion::ONE);
    }
}

proptest! {
    #[test]
    fn norm_is_multiplicative(x in oct(), y in oct()) {
        let lhs = (x * y).norm_sq();
        let rhs = x.norm_sq() * y.norm_sq();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn alternative_laws(x in oct(), y in oct()) {
        let s = x.norm_sq() * y.norm() + 1e-300;
        prop_assert!((x * (x * y)).max_abs_diff(&((x * x) * y)) <= 1e-12 * s);
        prop_assert!(((y * x) * x).max_abs_diff(&(y * (x * x))) <= 1e-12 * s);
    }

    #[test]
    fn moufang_identity(x in oct(), y in oct(), z in oct()) {
        // z(x(zy)) = ((zx)z)y
        let s = z.norm_sq() * x.norm() * y.norm() + 1e-300;
        prop_assert!((z * (x * (z * y))).max_abs_diff(&(((z * x) * z) * y)) <= 1e-12 * s);
    }

    #[test]
    fn inverse_is_two_sided(x in oct()) {
        prop_assume!(x.norm() > 1e-3);
        let inv = x.inverse().unwrap();
        prop_assert!((x * inv).max_abs_diff(&Octonion::ONE) <= 1e-12);
        prop_assert!((inv * x).max_abs_diff(&Octonion::ONE) <= 1e-12);
    }

    #[test]
    fn cylinder_round_trip(w in oct(), rho in 0.0f64..0.95, theta in tangent()) {
        prop_assume!(w.norm() > 1e-6);
        let w = w.scale(rho / w.norm());
        let c = CylCoord::new(w, theta).unwrap();
        let p = cyl_to_ads(&c).unwrap();
        prop_assert!((p.pseudo_norm() + 1.0).abs() <= 1e-12);
        prop_assert!(ads_project(&p).unwrap().max_abs_diff(&w) <= 1e-12);
        // radial coordinates: Re(y) sqrt(1 - rho^2) = cos eta
        let y0 = p.y.0[0] * (1.0 - rho * rho).sqrt();
        prop_assert!((y0 - c.eta().cos()).abs() <= 1e-12);
    }
}
