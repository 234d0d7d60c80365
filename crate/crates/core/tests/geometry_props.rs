use fracdisc::geometry::{
    check_h_hypotheses, check_starlike_mocanu, check_starlike_series, check_univalent,
    starlike_bound_from_h, u_prime_from_h, Certificate, DiscGrid,
};
use fracdisc::series::PowerSeries;
use fracdisc::special::gamma;
use fracdisc::{Complex64, FracOrder};
use proptest::prelude::*;

fn coeff(scale: f64) -> impl Strategy<Value = Complex64> {
    (-scale..scale, -scale..scale).prop_map(|(a, b)| Complex64::new(a, b))
}

fn poly_h(c: Vec<Complex64>) -> impl Fn(Complex64) -> Complex64 + Sync {
    move |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for ck in c.iter().rev() {
            acc = (acc + ck) * z;
        }
        acc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chain_inequality(c in prop::collection::vec(coeff(1.0), 1..6), q in 0.1f64..0.9) {
        let q = FracOrder::new(q).unwrap();
        let h = poly_h(c);
        let grid = DiscGrid::new(8, 32);
        let lhs = starlike_bound_from_h(&h, q, &grid, 32).unwrap();
        let rhs = check_h_hypotheses(&h, q, &grid, 1e-8).unwrap().starlike_m;
        prop_assert!(lhs <= rhs + 1e-8, "{lhs} > {rhs}");
    }

    #[test]
    fn uprime_is_linear_in_hprime(
        a in prop::collection::vec(coeff(1.0), 1..6),
        b in prop::collection::vec(coeff(1.0), 1..6),
        s in coeff(2.0),
        q in 0.1f64..0.9,
        zr in 0.0f64..0.99,
        za in 0.0f64..std::f64::consts::TAU,
    ) {
        let q = FracOrder::new(q).unwrap();
        let z = Complex64::from_polar(zr, za);
        let (fa, fb) = (poly_h(a), poly_h(b));
        let sum = |w: Complex64| fa(w) + s * fb(w);
        let ua = u_prime_from_h(&fa, q, z, 32).unwrap();
        let ub = u_prime_from_h(&fb, q, z, 32).unwrap();
        let us = u_prime_from_h(&sum, q, z, 32).unwrap();
        prop_assert!((us - (ua + s * ub)).norm() <= 1e-13 * (1.0 + us.norm()));
    }

    #[test]
    fn cauchy_matches_spectral(c in prop::collection::vec(coeff(0.5), 1..10)) {
        let mut coeffs = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        coeffs.extend(c);
        let u = PowerSeries::new(coeffs, 1.0).unwrap();
        let grid = DiscGrid::new(16, 32);
        let a = check_starlike_series(&u, &grid, 1e-8).sup_uprime_dev;
        let b = check_starlike_mocanu(&u, &grid, 1e-8).unwrap().sup_uprime_dev;
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn proven_certificates_are_witnessed(c in prop::collection::vec(coeff(0.6), 1..5)) {
        let mut coeffs = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        coeffs.extend(c);
        let du = PowerSeries::new(coeffs, 1.0).unwrap().derivative();
        let pts = DiscGrid::default().points();
        let samples: Vec<Complex64> = pts.iter().map(|&z| du.eval(z)).collect();
        let rep = check_univalent(&samples, 1e-8);
        if rep.certificate == Certificate::Proven {
            let rot = Complex64::from_polar(1.0, rep.beta.unwrap());
            prop_assert!(samples.iter().all(|w| (rot * w).re > 0.0));
        }
    }
}

#[test]
fn uprime_at_origin_is_one_under_the_normalization() {
    for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let qo = FracOrder::new(q).unwrap();
        let k = 1.0 / gamma(2.0 - q).unwrap();
        // any h with h′(0) = 1/Γ(2−q)
        let hp = move |w: Complex64| k + 0.4 * w - 0.2 * w * w;
        let v = u_prime_from_h(&hp, qo, Complex64::new(0.0, 0.0), 32).unwrap();
        assert!((v - 1.0).norm() <= 1e-10, "q = {q}: {v}");
    }
}
