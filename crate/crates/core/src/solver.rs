//! Picard iteration for the fixed point of `T` on polynomials over the
//! existence disc.
//!
//! Iterates are `u(z) = b + Σₖ cₖ (z/R₀)^k`, `k = 1..=N`. Each step
//! evaluates `Tu` at collocation nodes `ρ_m e^{iθ_j}` and refits the
//! coefficients by least squares with the constant term held at `b`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::existence::{
    estimate_m, radius_r0, require_condition_iv, ConditionIvReport, MEstimate, ProblemSpec,
    RadiusResult,
};
use crate::fractional::TOperator;
use crate::series::PowerSeries;
use crate::{par, AnalyticFn};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub degree: usize,
    pub n_theta: usize,
    pub n_rad: usize,
    pub n_quad: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    /// Angle grid per factor for the torus estimate of `M`.
    pub torus_grid: usize,
    /// Relative tolerance of the compatibility check at the origin.
    pub condition_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            degree: 24,
            n_theta: 16,
            n_rad: 12,
            n_quad: 48,
            tol: 1e-10,
            max_iter: 200,
            damping: 1.0,
            torus_grid: 64,
            condition_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::Config("degree must be at least 1".into()));
        }
        if self.n_theta * self.n_rad < self.degree + 1 {
            return Err(Error::Config(format!(
                "need n_theta * n_rad >= degree + 1 ({} * {} < {})",
                self.n_theta,
                self.n_rad,
                self.degree + 1
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Config("damping must lie in (0, 1]".into()));
        }
        if self.n_quad == 0 || self.max_iter == 0 {
            return Err(Error::Config("n_quad and max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// The solution polynomial; `poly.coeffs()[0] == b`.
    pub poly: PowerSeries,
    pub radius: RadiusResult,
    pub m_estimate: MEstimate,
    pub condition_iv: ConditionIvReport,
    /// Verification grid samples `(z, u(z))`.
    pub grid: Vec<(Complex64, Complex64)>,
    pub iterations: usize,
    /// `max |u − Tu|` on the verification grid.
    pub residual: f64,
    pub converged: bool,
    /// Sup change at the collocation nodes after each iteration.
    pub history: Vec<f64>,
}

impl Solution {
    pub fn r0(&self) -> f64 {
        self.radius.r0
    }
}

/// Collocation nodes `ρ_m e^{iθ_j}`: `θ_j = 2πj/n_theta` and
/// `ρ_m = R₀(1 − cos(π(m+1)/n_rad))/2`, so the radii cluster towards both
/// the origin and the rim and the last one equals `R₀`.
pub fn collocation_nodes(r0: f64, n_theta: usize, n_rad: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_theta * n_rad);
    for m in 0..n_rad {
        let rho = r0 * 0.5 * (1.0 - (PI * (m + 1) as f64 / n_rad as f64).cos());
        for j in 0..n_theta {
            out.push(Complex64::from_polar(rho, TAU * j as f64 / n_theta as f64));
        }
    }
    out
}

/// Verification grid: twice as many radii (up to and including `R₀`) and
/// angles as the collocation grid, with angles offset by half a step so no
/// point coincides with a collocation node.
pub fn verification_grid(r0: f64, n_theta: usize, n_rad: usize) -> Vec<Complex64> {
    let nr = 2 * n_rad;
    let nt = 2 * n_theta;
    let mut out = Vec::with_capacity(nr * nt);
    for k in 1..=nr {
        let rho = r0 * k as f64 / nr as f64;
        for j in 0..nt {
            out.push(Complex64::from_polar(
                rho,
                TAU * (j as f64 + 0.5) / nt as f64,
            ));
        }
    }
    out
}

fn to_series(b: Complex64, scaled: &[Complex64], r0: f64) -> PowerSeries {
    let mut coeffs = Vec::with_capacity(scaled.len() + 1);
    coeffs.push(b);
    let mut scale = 1.0;
    for &c in scaled {
        scale /= r0;
        coeffs.push(c * scale);
    }
    PowerSeries::new(coeffs, r0).expect("nonempty")
}

/// Solves the Volterra form of the problem on the existence disc.
///
/// Refuses specs that fail the compatibility check at the origin. When the
/// iteration stalls above `tol`, runs out of iterations, or the residual on
/// the verification grid exceeds `10·tol`, the best iterate is returned with
/// `converged = false`.
pub fn solve(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Solution> {
    solve_observed(spec, cfg, |_, _| {})
}

/// [`solve`] with a callback receiving every iterate.
pub fn solve_observed(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    observer: impl FnMut(usize, &PowerSeries),
) -> Result<Solution> {
    cfg.validate()?;
    let cond = require_condition_iv(spec, cfg.condition_tol)?;
    let m_estimate = estimate_m(spec, cfg.torus_grid)?;
    let radius = radius_r0(
        m_estimate.m,
        spec.order(),
        spec.outer_radius(),
        spec.ball_radius(),
    )?;
    let (poly, iterations, stalled, history) = picard(spec, cfg, radius.r0, observer)?;

    let grid_z = verification_grid(radius.r0, cfg.n_theta, cfg.n_rad);
    let residual = residual(&poly, spec, &grid_z, cfg.n_quad)?;
    let grid = grid_z.iter().map(|&z| (z, poly.eval(z))).collect();
    let converged = stalled && residual <= 10.0 * cfg.tol;
    Ok(Solution {
        poly,
        radius,
        m_estimate,
        condition_iv: cond,
        grid,
        iterations,
        residual,
        converged,
        history,
    })
}

type PicardOutcome = (PowerSeries, usize, bool, Vec<f64>);

fn picard(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    r0: f64,
    mut observer: impl FnMut(usize, &PowerSeries),
) -> Result<PicardOutcome> {
    let b = spec.initial_value();
    let big_f = spec.scaled_fn();
    let op = TOperator::new(spec.order(), cfg.n_quad)?;
    let nodes = collocation_nodes(r0, cfg.n_theta, cfg.n_rad);

    let n = cfg.degree;
    let vander = DMatrix::from_fn(nodes.len(), n, |i, k| {
        let w = nodes[i] / r0;
        w.powi(k as i32 + 1)
    });
    let pinv = vander
        .clone()
        .pseudo_inverse(1e-13)
        .map_err(|e| Error::Config(format!("collocation fit failed: {e}")))?;

    let mut coeffs = DVector::<Complex64>::zeros(n);
    let mut best = (f64::INFINITY, coeffs.clone());
    let mut history = Vec::new();
    let mut stalled = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iter {
        iterations = it;
        let u = to_series(b, coeffs.as_slice(), r0);
        let tu = par::try_map(&nodes, |&z| op.apply(&big_f, &u, z))?;
        let rhs = DVector::from_iterator(nodes.len(), tu.into_iter().map(|v| v - b));
        let fitted = &pinv * rhs;
        let next = coeffs.scale(1.0 - cfg.damping) + fitted.scale(cfg.damping);
        let delta = &vander * (&next - &coeffs);
        let change = delta.iter().fold(0.0f64, |acc, d| acc.max(d.norm()));
        coeffs = next;
        history.push(change);
        observer(it, &to_series(b, coeffs.as_slice(), r0));

        if !change.is_finite()
            || coeffs
                .iter()
                .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            break;
        }
        if change < best.0 {
            best = (change, coeffs.clone());
        }
        if change <= cfg.tol {
            stalled = true;
            break;
        }
    }
    let chosen = if stalled { coeffs } else { best.1 };
    Ok((
        to_series(b, chosen.as_slice(), r0),
        iterations,
        stalled,
        history,
    ))
}

/// `max |u(z) − Tu(z)|` over `grid`.
pub fn residual<U: AnalyticFn + ?Sized>(
    u: &U,
    spec: &ProblemSpec,
    grid: &[Complex64],
    n_quad: usize,
) -> Result<f64> {
    let op = TOperator::new(spec.order(), n_quad)?;
    let big_f = spec.scaled_fn();
    let defects = par::try_map(grid, |&z| Ok((u.eval(z)? - op.apply(&big_f, u, z)?).norm()))?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallReport {
    /// `max |Tu(z) − b|` over the grid.
    pub max_dev: f64,
    pub pass: bool,
}

/// Computes `sup |Tu − b|` on `grid` and compares it with the ball radius
/// `r`: the sampled form of `T(B_r) ⊆ B_r`.
pub fn ball_invariance_check<U: AnalyticFn + ?Sized>(
    spec: &ProblemSpec,
    u: &U,
    grid: &[Complex64],
    n_quad: usize,
    tol: f64,
) -> Result<BallReport> {
    let op = TOperator::new(spec.order(), n_quad)?;
    let big_f = spec.scaled_fn();
    let b = spec.initial_value();
    let devs = par::try_map(grid, |&z| Ok((op.apply(&big_f, u, z)? - b).norm()))?;
    let max_dev = devs.into_iter().fold(0.0, f64::max);
    Ok(BallReport {
        max_dev,
        pass: max_dev <= spec.ball_radius() + tol,
    })
}
