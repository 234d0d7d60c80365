use fracdisc::existence::torus_max;
use fracdisc::schwarz::{schwarz1_bound, schwarz2_check, slice_quotient, BidiscSpec, SampleGrid};
use fracdisc::Complex64;
use proptest::prelude::*;

/// `Σ c_jk z^j (t − b)^k` over `0 < j + k ≤ 3`.
fn poly(c: Vec<Complex64>, b: Complex64) -> impl Fn(Complex64, Complex64) -> Complex64 + Sync {
    move |z: Complex64, t: Complex64| {
        let s = t - b;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = 0;
        for j in 0..=3 {
            for k in 0..=3 - j {
                if j + k == 0 {
                    continue;
                }
                acc += c[idx] * z.powi(j) * s.powi(k);
                idx += 1;
            }
        }
        acc
    }
}

fn coeffs() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)),
        9,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_polynomials_obey_the_bound(
        c in coeffs(),
        big_r in 0.3f64..2.0,
        r in 0.3f64..2.0,
        br in -1.0f64..1.0,
        bi in -1.0f64..1.0,
        offset in 0.0f64..1.0,
    ) {
        let b = Complex64::new(br, bi);
        let g = poly(c, b);
        let m = torus_max(&g, big_r, b, r, 128).unwrap().m;
        prop_assume!(m > 1e-6);
        let spec = BidiscSpec::new(big_r, r, b).unwrap();
        let grid = SampleGrid::new(12, 24).with_offset(offset);
        let rep = schwarz2_check(&g, m, &spec, &grid, 1e-9).unwrap();
        prop_assert!(rep.pass, "worst ratio {}", rep.worst_ratio);
        prop_assert!(rep.bounded_by_m);
    }

    #[test]
    fn slice_quotient_is_bounded_on_the_rim(
        c in coeffs(),
        a1 in 0.0f64..std::f64::consts::TAU,
        a2 in 0.0f64..std::f64::consts::TAU,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let b = Complex64::new(0.2, -0.1);
        let (big_r, r) = (1.2, 0.8);
        let g = poly(c, b);
        let m = torus_max(&g, big_r, b, r, 128).unwrap().m;
        let spec = BidiscSpec::new(big_r, r, b).unwrap();
        let xi1 = Complex64::from_polar(big_r, a1);
        let xi2 = b + Complex64::from_polar(r, a2);
        let eta = Complex64::from_polar(big_r, phi);
        let psi = slice_quotient(&g, xi1, xi2, eta, &spec).unwrap();
        prop_assert!(psi.norm() <= m / big_r * (1.0 + 1e-9));
        // the removable point η = 0 is finite
        let psi0 = slice_quotient(&g, xi1, xi2, Complex64::new(0.0, 0.0), &spec).unwrap();
        prop_assert!(psi0.norm().is_finite());
    }

    #[test]
    fn one_variable_bound_for_scaled_polynomials(
        c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), 1..6),
        rad in 0.1f64..1.0,
        zr in 0.0f64..1.0,
        za in 0.0f64..std::f64::consts::TAU,
    ) {
        // u − b = r · p(z/R)/Σ|c| has |u − b| ≤ r on the disc and vanishes at 0
        let b = Complex64::new(0.5, 0.5);
        let (big_r, r) = (2.0, 0.7);
        let norm: f64 = c.iter().map(|x| x.norm()).sum();
        prop_assume!(norm > 1e-9);
        let u = move |z: Complex64| {
            let w = z / big_r;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, ck) in c.iter().enumerate() {
                acc += ck * w.powi(k as i32 + 1);
            }
            b + r * acc / norm
        };
        let z = Complex64::from_polar(big_r * rad * zr, za);
        prop_assert!(schwarz1_bound(&u, b, r, big_r, z).unwrap() >= -1e-12);
    }
}
