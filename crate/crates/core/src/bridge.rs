//! Real-line problems solved through their complex extension.
//!
//! A real problem with right-hand side `f(x, y)` and real initial value
//! `b` is extended by writing `z, t` for `x, y`. If `f` has real
//! coefficients, the complex solution is real on `[0, R₀]` and its real part
//! solves the real Volterra equation
//!
//! ```text
//! u(x) = 1/Γ(q) ∫₀^x f(s, u(s)) (x − s)^(q−1) ds.
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::existence::ProblemSpec;
use crate::expr::Expr;
use crate::fractional::TOperator;
use crate::solver::{solve, Solution, SolverConfig};
use crate::{par, Fallible, FracOrder};

/// Largest `|Im u(x)|` on the real samples still treated as real.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RealSolution {
    /// Equally spaced points of `[0, R₀]`, starting at 0.
    pub xs: Vec<f64>,
    /// `Re u(x)`; `us[0] == b`.
    pub us: Vec<f64>,
    /// Pointwise defect of the real Volterra equation.
    pub defects: Vec<f64>,
    pub r0: f64,
    pub volterra_residual: f64,
    /// Whether `|Im u| ≤ 1e-8` on the samples.
    pub symmetric: bool,
    pub max_imag: f64,
    pub warnings: Vec<String>,
    pub solution: Solution,
}

impl RealSolution {
    pub fn converged(&self) -> bool {
        self.solution.converged
    }
}

/// Builds the complex spec for a real problem. `f` may be written in
/// `x, y` or already in `z, t`.
pub fn extend_problem(
    q: FracOrder,
    b: f64,
    f: &Expr,
    outer_radius: f64,
    ball_radius: f64,
) -> Result<ProblemSpec> {
    let spec = ProblemSpec::new(
        q,
        Complex64::new(b, 0.0),
        f.extend_to_complex(),
        outer_radius,
        ball_radius,
    )?;
    if !spec.has_real_coefficients() {
        return Err(Error::Hypothesis(
            "the real-line bridge needs f with real coefficients".into(),
        ));
    }
    Ok(spec)
}

/// Solves the extended problem and samples `Re u` at `n_x` equally spaced
/// points of `[0, R₀]`, checking the real Volterra equation there.
pub fn bridge_solve(spec: &ProblemSpec, cfg: &SolverConfig, n_x: usize) -> Result<RealSolution> {
    let b = spec.initial_value();
    if b.im != 0.0 {
        return Err(Error::Hypothesis(format!(
            "initial value must be real, got {b}"
        )));
    }
    if n_x < 2 {
        return Err(Error::Config("n_x must be at least 2".into()));
    }
    let solution = solve(spec, cfg)?;
    let r0 = solution.r0();
    let xs: Vec<f64> = (0..n_x).map(|j| r0 * j as f64 / (n_x - 1) as f64).collect();
    let complex_u: Vec<Complex64> = xs
        .iter()
        .map(|&x| solution.poly.eval(Complex64::new(x, 0.0)))
        .collect();
    let us: Vec<f64> = complex_u.iter().map(|u| u.re).collect();
    let max_imag = complex_u.iter().map(|u| u.im.abs()).fold(0.0, f64::max);
    let symmetric = max_imag <= SYMMETRY_TOL;
    let mut warnings = Vec::new();
    if !symmetric {
        warnings.push(format!(
            "complex solution is not real on the real axis (max |Im u| = {max_imag:.3e}); the extension is not real-compatible"
        ));
    }

    let defects = real_defects(spec, &solution, &xs, cfg.n_quad)?;
    let volterra_residual = defects.iter().copied().fold(0.0, f64::max);
    Ok(RealSolution {
        xs,
        us,
        defects,
        r0,
        volterra_residual,
        symmetric,
        max_imag,
        warnings,
        solution,
    })
}

/// `|u(x) − 1/Γ(q) ∫₀^x f(s, u(s)) (x − s)^(q−1) ds|` with `u = Re(poly)`
/// and `f` evaluated at real arguments only.
fn real_defects(
    spec: &ProblemSpec,
    solution: &Solution,
    xs: &[f64],
    n_quad: usize,
) -> Result<Vec<f64>> {
    let op = TOperator::new(spec.order(), n_quad)?;
    let scaled = spec.scaled_fn();
    let poly = &solution.poly;
    let real_u = |s: Complex64| Complex64::new(poly.eval(Complex64::new(s.re, 0.0)).re, 0.0);
    let real_f = Fallible(|s: Complex64, y: Complex64| {
        let v = crate::AnalyticFn2::eval2(
            &scaled,
            Complex64::new(s.re, 0.0),
            Complex64::new(y.re, 0.0),
        )?;
        Ok(Complex64::new(v.re, 0.0))
    });
    par::try_map(xs, |&x| {
        let z = Complex64::new(x, 0.0);
        Ok((real_u(z) - op.apply(&real_f, &real_u, z)?).norm())
    })
}
