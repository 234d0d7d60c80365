//! Complex Riemann–Liouville calculus on discs centred at the origin.
//!
//! The crate evaluates the fractional integral and derivative of order
//! `q ∈ (0, 1)` along rays from the origin, solves the weakly singular
//! Volterra equation
//!
//! ```text
//! u(z) = 1/Γ(q) ∫₀^z f(ζ, u(ζ)) (z − ζ)^(q−1) dζ
//! ```
//!
//! by Picard iteration on a polynomial collocation space, computes the
//! radius on which a solution is guaranteed to exist, and certifies
//! univalence / starlikeness of solutions of the `f(z, t) = z^(−q) h(z)`
//! family.
//!
//! Problems are written with the small expression language in [`expr`]:
//!
//! ```
//! use fracdisc::existence::ProblemSpec;
//! use fracdisc::solver::{solve, SolverConfig};
//! use fracdisc::FracOrder;
//! use num_complex::Complex64;
//!
//! let spec = ProblemSpec::parse(
//!     FracOrder::new(0.5).unwrap(),
//!     Complex64::new(1.0, 0.0),
//!     "z^(-q)*(t + (q/(1-q))*z)/gamma(1-q)",
//!     1.0,
//!     1.0,
//! )
//! .unwrap();
//! let sol = solve(&spec, &SolverConfig::default()).unwrap();
//! assert!(sol.converged);
//! let z = Complex64::new(0.2, 0.1);
//! assert!((sol.poly.eval(z) - (1.0 + z)).norm() < 1e-10);
//! ```
//!
//! ## Feature flags
//!
//! - `parallel` (default): grid evaluations run on the rayon global pool.
//!   Without it every loop runs sequentially. Reductions happen in a fixed
//!   order either way, so results are bitwise identical.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod error;
pub mod existence;
pub mod expr;
pub mod fractional;
pub mod geometry;
mod order;
pub mod par;
pub mod schwarz;
pub mod series;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use order::FracOrder;

/// An analytic function of one complex variable, evaluated pointwise.
///
/// Closures `Fn(Complex64) -> Complex64` implement this directly; fallible
/// sources (parsed expressions) return evaluation errors.
pub trait AnalyticFn: Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
}

impl<F> AnalyticFn for F
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self(z))
    }
}

/// A function of two complex variables `(z, t)`, analytic in each.
pub trait AnalyticFn2: Sync {
    fn eval2(&self, z: Complex64, t: Complex64) -> Result<Complex64>;
}

impl<F> AnalyticFn2 for F
where
    F: Fn(Complex64, Complex64) -> Complex64 + Sync,
{
    fn eval2(&self, z: Complex64, t: Complex64) -> Result<Complex64> {
        Ok(self(z, t))
    }
}

/// Adapter for closures that can fail.
pub struct Fallible<F>(pub F);

impl<F> AnalyticFn for Fallible<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.0)(z)
    }
}

impl<F> AnalyticFn2 for Fallible<F>
where
    F: Fn(Complex64, Complex64) -> Result<Complex64> + Sync,
{
    fn eval2(&self, z: Complex64, t: Complex64) -> Result<Complex64> {
        (self.0)(z, t)
    }
}
