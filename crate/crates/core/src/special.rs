//! Gamma and Beta functions on the positive axis, principal-branch complex
//! powers, and Gauss–Jacobi rules on `[0, 1]`.

// The Lanczos constants are kept exactly as published.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default number of quadrature nodes.
pub const DEFAULT_QUAD_NODES: usize = 32;

const LANCZOS_G: f64 = 6.024_680_040_776_729_583_740_234_375;
const LANCZOS_G_MINUS_HALF: f64 = 5.524_680_040_776_729_583_740_234_375;

// Rational Lanczos sum with g ≈ 6.0247, N = 13 (same table as CPython's
// math.gamma). Numerator and denominator are evaluated by Horner.
const LANCZOS_NUM: [f64; 13] = [
    23531376880.410759688572007674451636754734846804940,
    42919803642.649098768957899047001988850926355848959,
    35711959237.355668049440185451547166705960488635843,
    17921034426.037209699919755754458931112671403265390,
    6039542586.3520280050642916443072979210699388420708,
    1439720407.3117216736632230727949123939715485786772,
    248874557.86205415651146038641322942321632125127801,
    31426415.585400194380614231628318205362874684987640,
    2876370.6289353724412254090516208496135991145378768,
    186056.26539522349504029498971604569928220784236328,
    8071.6720023658162106380029022722506138218516325024,
    210.82427775157934587250973392071336271166969580291,
    2.5066282746310002701649081771338373386264310793408,
];
const LANCZOS_DEN: [f64; 13] = [
    0.0,
    39916800.0,
    120543840.0,
    150917976.0,
    105258076.0,
    45995730.0,
    13339535.0,
    2637558.0,
    357423.0,
    32670.0,
    1925.0,
    66.0,
    1.0,
];

const FACTORIALS: [f64; 23] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
    51090942171709440000.0,
    1124000727777607680000.0,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    if x < 5.0 {
        for i in (0..13).rev() {
            num = num * x + LANCZOS_NUM[i];
            den = den * x + LANCZOS_DEN[i];
        }
    } else {
        for i in 0..13 {
            num = num / x + LANCZOS_NUM[i];
            den = den / x + LANCZOS_DEN[i];
        }
    }
    num / den
}

/// Γ(x) for real `x > 0`.
///
/// Relative error is a few ulps across `(0, 171)`; integers up to 23 are
/// exact. Arguments past the overflow threshold return `+inf`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::Domain {
            what: "gamma requires a finite positive argument",
            value: x,
        });
    }
    Ok(gamma_pos(x))
}

fn gamma_pos(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= FACTORIALS.len() as f64 {
        return FACTORIALS[x as usize - 1];
    }
    if x < 1e-20 {
        return 1.0 / x;
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let y = x + LANCZOS_G_MINUS_HALF;
    // Compensate for the rounding error in y.
    let corr = if x > LANCZOS_G_MINUS_HALF {
        let q = y - x;
        q - LANCZOS_G_MINUS_HALF
    } else {
        let q = y - LANCZOS_G_MINUS_HALF;
        q - x
    };
    let corr = corr * LANCZOS_G / y;
    let mut r = lanczos_sum(x) / y.exp();
    r += corr * r;
    if x > 140.0 {
        let sqrtpow = y.powf(x / 2.0 - 0.25);
        r *= sqrtpow;
        r *= sqrtpow;
    } else {
        r *= y.powf(x - 0.5);
    }
    r
}

/// Reciprocal Gamma `1/Γ(x)` for `x > −1`, with `1/Γ(0) = 0`.
///
/// Used for generalized monomial coefficients where the argument can hit
/// the pole at zero.
pub(crate) fn rgamma(x: f64) -> f64 {
    debug_assert!(x > -1.0);
    if x == 0.0 {
        0.0
    } else if x < 0.0 {
        // Γ(x) = Γ(x + 1) / x
        x / gamma_pos(x + 1.0)
    } else {
        1.0 / gamma_pos(x)
    }
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b) for `a, b > 0`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || a.is_infinite() {
        return Err(Error::Domain {
            what: "beta requires positive arguments",
            value: a,
        });
    }
    if !(b > 0.0) || b.is_infinite() {
        return Err(Error::Domain {
            what: "beta requires positive arguments",
            value: b,
        });
    }
    Ok(gamma_pos(a) * gamma_pos(b) / gamma_pos(a + b))
}

/// Principal argument in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PrincipalArg(f64);

impl PrincipalArg {
    pub fn of(w: Complex64) -> Self {
        let a = w.im.atan2(w.re);
        // atan2(-0.0, x<0) gives -π; the negative real axis belongs to +π.
        if a <= -PI {
            Self(PI)
        } else {
            Self(a)
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Principal-branch power `|w|^α · exp(iα Arg w)` with `Arg ∈ (−π, π]`.
///
/// `0^α` is `0` for `α > 0` and `1` for `α = 0`; a negative exponent at
/// the origin is a singularity. Small integer exponents are evaluated by
/// repeated multiplication, which coincides with the principal value.
pub fn ppow(w: Complex64, alpha: f64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        return if alpha > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else if alpha == 0.0 {
            Ok(Complex64::new(1.0, 0.0))
        } else {
            Err(Error::Singularity(format!("0^({alpha})")))
        };
    }
    if alpha.fract() == 0.0 && alpha.abs() <= 64.0 {
        return Ok(w.powi(alpha as i32));
    }
    let arg = PrincipalArg::of(w).value();
    Ok(Complex64::from_polar(w.norm().powf(alpha), alpha * arg))
}

/// Gauss–Jacobi rule for `∫₀¹ t^β (1−t)^α φ(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    alpha: f64,
    beta: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to a real integrand, ascending node order.
    pub fn integrate_real(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(0.0, |acc, (&t, &w)| acc + w * f(t))
    }

    /// Applies the rule to a complex integrand, ascending node order.
    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex64::new(0.0, 0.0), |acc, (&t, &w)| acc + w * f(t))
    }

    /// Fallible variant of [`QuadRule::integrate`]; stops at the first error.
    pub fn try_integrate(&self, f: impl Fn(f64) -> Result<Complex64>) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(t)?;
        }
        Ok(acc)
    }
}

/// Builds the `n`-point Gauss–Jacobi rule for the weight `t^β (1−t)^α` on
/// `[0, 1]` by the Golub–Welsch eigenvalue method.
pub fn jacobi_rule(alpha: f64, beta: f64, n: usize) -> Result<QuadRule> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Domain {
            what: "Jacobi exponent alpha must exceed -1",
            value: alpha,
        });
    }
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::Domain {
            what: "Jacobi exponent beta must exceed -1",
            value: beta,
        });
    }
    if n == 0 {
        return Err(Error::Domain {
            what: "quadrature rule needs at least one node",
            value: 0.0,
        });
    }

    // Jacobi matrix on [-1, 1] for (1-x)^a (1+x)^b, then mapped by t = (x+1)/2.
    let (a, b) = (alpha, beta);
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            let s = 2.0 * kf + ab;
            (b * b - a * a) / (s * (s + 2.0))
        };
        jac[(k, k)] = 0.5 * (diag + 1.0);
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + ab;
            // The general form is 0/0 at m = 1 when a + b = -1.
            let off2 = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = 0.5 * off2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }

    let eig = jac
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Quadrature(format!("eigensolve did not converge (n = {n})")))?;

    let mu0 = beta_unchecked(b + 1.0, a + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let ordered = nodes.windows(2).all(|w| w[0] < w[1]);
    let inside = nodes.iter().all(|&t| t > 0.0 && t < 1.0);
    let positive = weights.iter().all(|&w| w > 0.0 && w.is_finite());
    if !(ordered && inside && positive) {
        return Err(Error::Quadrature(format!(
            "degenerate rule for alpha = {alpha}, beta = {beta}, n = {n}"
        )));
    }
    Ok(QuadRule {
        alpha,
        beta,
        nodes,
        weights,
    })
}

fn beta_unchecked(a: f64, b: f64) -> f64 {
    gamma_pos(a) * gamma_pos(b) / gamma_pos(a + b)
}
