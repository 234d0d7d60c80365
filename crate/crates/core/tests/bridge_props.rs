use fracdisc::bridge::{bridge_solve, extend_problem};
use fracdisc::expr::parse;
use fracdisc::solver::SolverConfig;
use fracdisc::FracOrder;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn real_problems_stay_real(
        q in 0.2f64..0.8,
        b in 0.2f64..1.5,
        c1 in -0.5f64..0.5,
        c2 in -0.4f64..0.4,
    ) {
        let f = parse(&format!("x^(-q)*(y/gamma(1-q) + {c1}*x + {c2}*x*(y - b))")).unwrap();
        let spec = extend_problem(FracOrder::new(q).unwrap(), b, &f, 1.0, 1.0).unwrap();
        let cfg = SolverConfig { degree: 10, n_theta: 8, n_rad: 4, n_quad: 24, torus_grid: 32, ..SolverConfig::default() };
        let sol = bridge_solve(&spec, &cfg, 11).unwrap();
        prop_assume!(sol.converged());
        prop_assert!(sol.symmetric);
        prop_assert!(sol.max_imag <= 1e-8);
        prop_assert_eq!(sol.us[0], b);
        prop_assert!(sol.volterra_residual <= 10.0 * sol.solution.residual.max(cfg.tol));
    }
}
