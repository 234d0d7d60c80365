//! Sampling verifiers for the one- and two-variable Schwarz bounds.
//!
//! For `g` analytic on the bidisc `|z| ≤ R`, `|t − b| ≤ r` with `g(0, b) = 0`
//! and `|g| ≤ M`, the two-variable bound reads
//!
//! ```text
//! |g(z, t)| ≤ M · max(|z|/R, |t − b|/r).
//! ```
//!
//! Its proof restricts `g` to complex lines through `(0, b)` via
//! [`slice_map`] and applies the one-variable lemma to the quotient
//! [`slice_quotient`].

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fractional::cauchy_derivative;
use crate::{par, AnalyticFn, AnalyticFn2, Fallible};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BidiscSpec {
    pub outer_radius: f64,
    pub ball_radius: f64,
    pub center: Complex64,
}

impl BidiscSpec {
    pub fn new(outer_radius: f64, ball_radius: f64, center: Complex64) -> Result<Self> {
        if !(outer_radius > 0.0 && ball_radius > 0.0) {
            return Err(Error::Domain {
                what: "bidisc radii must be positive",
                value: outer_radius.min(ball_radius),
            });
        }
        Ok(Self {
            outer_radius,
            ball_radius,
            center,
        })
    }
}

/// Polar sampling of one closed disc: `radii` equally spaced radii from 0
/// to the full radius and `angles` angles shifted by `offset` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub radii: usize,
    pub angles: usize,
    pub offset: f64,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self {
            radii: 24,
            angles: 48,
            offset: 0.0,
        }
    }
}

impl SampleGrid {
    pub fn new(radii: usize, angles: usize) -> Self {
        Self {
            radii,
            angles,
            offset: 0.0,
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// Points of the closed disc of `radius` centred at `center`; the
    /// centre appears once.
    pub fn points(&self, center: Complex64, radius: f64) -> Vec<Complex64> {
        let mut pts = vec![center];
        let nr = self.radii.max(2);
        for k in 1..nr {
            let rho = radius * k as f64 / (nr - 1) as f64;
            for j in 0..self.angles.max(1) {
                let theta = TAU * (j as f64 + self.offset) / self.angles.max(1) as f64;
                pts.push(center + Complex64::from_polar(rho, theta));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzReport {
    pub checked: usize,
    /// `max |g| / (M · max(|z|/R, |t−b|/r))` over the samples.
    pub worst_ratio: f64,
    pub worst_point: (Complex64, Complex64),
    pub pass: bool,
    /// Largest sampled `|g|`.
    pub max_modulus: f64,
    /// Whether the sampled `|g|` stayed within `M(1 + tol)`.
    pub bounded_by_m: bool,
    pub grid: SampleGrid,
}

fn check_boundary(value: f64, expected: f64, what: &'static str) -> Result<()> {
    if (value - expected).abs() > 1e-12 * expected.max(1.0) {
        return Err(Error::Hypothesis(format!(
            "{what}: expected modulus {expected}, got {value}"
        )));
    }
    Ok(())
}

/// `Φ_ξ(η) = (ξ₁η/R, (ξ₂ − b)η/R + b)` for `ξ` on the distinguished boundary.
pub fn slice_map(
    xi1: Complex64,
    xi2: Complex64,
    eta: Complex64,
    spec: &BidiscSpec,
) -> Result<(Complex64, Complex64)> {
    let big_r = spec.outer_radius;
    check_boundary(xi1.norm(), big_r, "xi1 must lie on |z| = R")?;
    check_boundary(
        (xi2 - spec.center).norm(),
        spec.ball_radius,
        "xi2 must lie on |t - b| = r",
    )?;
    if eta.norm() > big_r * (1.0 + 1e-12) {
        return Err(Error::Hypothesis(format!(
            "eta must lie in |eta| <= R, got |eta| = {}",
            eta.norm()
        )));
    }
    Ok((
        xi1 * eta / big_r,
        (xi2 - spec.center) * eta / big_r + spec.center,
    ))
}

/// `ψ(η) = g(Φ_ξ(η))/η`, continued to `η = 0` by the derivative of
/// `g ∘ Φ_ξ` at the origin.
pub fn slice_quotient<G: AnalyticFn2 + ?Sized>(
    g: &G,
    xi1: Complex64,
    xi2: Complex64,
    eta: Complex64,
    spec: &BidiscSpec,
) -> Result<Complex64> {
    let composed = Fallible(|w: Complex64| {
        let (z, t) = slice_map(xi1, xi2, w, spec)?;
        g.eval2(z, t)
    });
    if eta == Complex64::new(0.0, 0.0) {
        return cauchy_derivative(&composed, eta, 0.5 * spec.outer_radius, 64);
    }
    Ok(composed.eval(eta)? / eta)
}

/// Samples `(z, t)` on a product of polar grids and compares `|g|` with
/// the two-variable Schwarz bound.
///
/// `g(0, b) ≠ 0` (beyond `tol`) is a hypothesis violation and returns an
/// error; a sampled ratio above `1 + tol` is a bound violation and is
/// reported with `pass = false`.
pub fn schwarz2_check<G: AnalyticFn2 + ?Sized>(
    g: &G,
    m: f64,
    spec: &BidiscSpec,
    grid: &SampleGrid,
    tol: f64,
) -> Result<SchwarzReport> {
    if !(m > 0.0) {
        return Err(Error::Domain {
            what: "M must be positive",
            value: m,
        });
    }
    let g0 = g.eval2(Complex64::new(0.0, 0.0), spec.center)?;
    if g0.norm() > tol {
        return Err(Error::Hypothesis(format!(
            "g(0, b) must vanish, got |g(0, b)| = {:e}",
            g0.norm()
        )));
    }
    let zs = grid.points(Complex64::new(0.0, 0.0), spec.outer_radius);
    let ts = grid.points(spec.center, spec.ball_radius);

    // Per z: (worst ratio, index of t, max modulus, count)
    let rows = par::try_map(&zs, |&z| -> Result<(f64, usize, f64, usize)> {
        let zr = z.norm() / spec.outer_radius;
        let mut worst = (f64::NEG_INFINITY, 0usize);
        let mut max_mod: f64 = 0.0;
        let mut count = 0;
        for (k, &t) in ts.iter().enumerate() {
            let scale = zr.max((t - spec.center).norm() / spec.ball_radius);
            let v = g.eval2(z, t)?.norm();
            max_mod = max_mod.max(v);
            if scale == 0.0 {
                continue;
            }
            count += 1;
            let ratio = v / (m * scale);
            if ratio > worst.0 {
                worst = (ratio, k);
            }
        }
        Ok((worst.0, worst.1, max_mod, count))
    })?;

    let mut worst = (f64::NEG_INFINITY, 0usize, 0usize);
    let mut max_modulus: f64 = 0.0;
    let mut checked = 0;
    for (i, &(ratio, k, mm, n)) in rows.iter().enumerate() {
        checked += n;
        max_modulus = max_modulus.max(mm);
        if ratio > worst.0 {
            worst = (ratio, i, k);
        }
    }
    Ok(SchwarzReport {
        checked,
        worst_ratio: worst.0,
        worst_point: (zs[worst.1], ts[worst.2]),
        pass: worst.0 <= 1.0 + tol,
        max_modulus,
        bounded_by_m: max_modulus <= m * (1.0 + tol),
        grid: *grid,
    })
}

/// Slack `r|z|/R − |u(z) − b|` of the one-variable Schwarz bound; negative
/// values mean the bound fails at `z`.
pub fn schwarz1_bound<U: AnalyticFn + ?Sized>(
    u: &U,
    b: Complex64,
    ball_radius: f64,
    outer_radius: f64,
    z: Complex64,
) -> Result<f64> {
    Ok(ball_radius * z.norm() / outer_radius - (u.eval(z)? - b).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn slice_map_examples() {
        let spec = BidiscSpec::new(2.0, 1.0, c(0.0, 0.0)).unwrap();
        let (z, t) = slice_map(c(0.0, 2.0), c(1.0, 0.0), c(1.0, 0.0), &spec).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-15 && (t - c(0.5, 0.0)).norm() < 1e-15);

        let b = c(0.3, -0.2);
        let spec = BidiscSpec::new(1.5, 0.5, b).unwrap();
        let xi = (c(1.5, 0.0), b + 0.5);
        assert_eq!(
            slice_map(xi.0, xi.1, c(0.0, 0.0), &spec).unwrap(),
            (c(0.0, 0.0), b)
        );
        let (z, t) = slice_map(xi.0, xi.1, c(1.5, 0.0), &spec).unwrap();
        assert!((z - xi.0).norm() < 1e-15 && (t - xi.1).norm() < 1e-15);

        assert!(slice_map(c(1.0, 0.0), xi.1, c(0.0, 0.0), &spec).is_err());
        assert!(slice_map(xi.0, b, c(0.0, 0.0), &spec).is_err());
        assert!(slice_map(xi.0, xi.1, c(2.0, 0.0), &spec).is_err());
    }

    #[test]
    fn equality_cases() {
        let spec = BidiscSpec::new(2.0, 0.5, c(1.0, 1.0)).unwrap();
        let m = 3.0;
        let gz = move |z: Complex64, _t: Complex64| m * z / 2.0;
        let rep = schwarz2_check(&gz, m, &spec, &SampleGrid::new(8, 16), 1e-12).unwrap();
        assert!(rep.pass && (rep.worst_ratio - 1.0).abs() < 1e-12);

        let b = spec.center;
        let gt = move |_z: Complex64, t: Complex64| m * (t - b) / 0.5;
        let rep = schwarz2_check(&gt, m, &spec, &SampleGrid::new(8, 16), 1e-12).unwrap();
        assert!(rep.pass && (rep.worst_ratio - 1.0).abs() < 1e-12);
        assert!(rep.bounded_by_m);
    }

    #[test]
    fn product_normalized_on_torus() {
        // |z (t - b)| on the torus is R r; c = M/(R r) makes the torus max M.
        let spec = BidiscSpec::new(1.2, 0.7, c(-0.5, 0.0)).unwrap();
        let m = 2.0;
        let b = spec.center;
        let k = m / (1.2 * 0.7);
        let g = move |z: Complex64, t: Complex64| k * z * (t - b);
        let rep = schwarz2_check(
            &g,
            m,
            &spec,
            &SampleGrid::new(10, 20).with_offset(0.37),
            1e-12,
        )
        .unwrap();
        assert!(rep.pass && rep.worst_ratio <= 1.0);
    }

    #[test]
    fn violations_are_distinct() {
        let spec = BidiscSpec::new(1.0, 1.0, c(0.0, 0.0)).unwrap();
        let shifted = |_z: Complex64, t: Complex64| t + 0.1;
        assert!(matches!(
            schwarz2_check(&shifted, 1.0, &spec, &SampleGrid::new(4, 8), 1e-9),
            Err(Error::Hypothesis(_))
        ));
        // too small an M: bound fails, hypothesis |g| <= M also flagged
        let g = |z: Complex64, _t: Complex64| 2.0 * z;
        let rep = schwarz2_check(&g, 1.0, &spec, &SampleGrid::new(4, 8), 1e-9).unwrap();
        assert!(!rep.pass && !rep.bounded_by_m);
        assert!((rep.worst_ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn one_variable_slack() {
        let (b, r, big_r) = (c(0.5, 0.5), 0.8, 2.0);
        let z = c(0.6, -0.8);
        let s = schwarz1_bound(&move |_z: Complex64| b, b, r, big_r, z).unwrap();
        assert!((s - r * 1.0 / big_r).abs() < 1e-15);
        let rot = move |w: Complex64| b + r * w / big_r;
        assert!(schwarz1_bound(&rot, b, r, big_r, z).unwrap().abs() < 1e-15);
        let sq = move |w: Complex64| b + r * (w / big_r) * (w / big_r);
        let s = schwarz1_bound(&sq, b, r, big_r, c(big_r / 2.0, 0.0)).unwrap();
        assert!((s - r / 4.0).abs() < 1e-15);
    }

    #[test]
    fn quotient_bounded_on_boundary() {
        let spec = BidiscSpec::new(1.0, 2.0, c(0.0, 1.0)).unwrap();
        let b = spec.center;
        // torus max of |z + (t-b)/2| is 2
        let g = move |z: Complex64, t: Complex64| z + (t - b) / 2.0;
        let m = 2.0;
        for k in 0..8 {
            let xi1 = Complex64::from_polar(1.0, 0.8 * k as f64);
            let xi2 = b + Complex64::from_polar(2.0, 1.3 * k as f64);
            let at0 = slice_quotient(&g, xi1, xi2, c(0.0, 0.0), &spec).unwrap();
            let near = slice_quotient(&g, xi1, xi2, c(1e-7, 0.0), &spec).unwrap();
            assert!((at0 - near).norm() < 1e-6);
            for j in 0..16 {
                let eta = Complex64::from_polar(1.0, TAU * j as f64 / 16.0);
                let v = slice_quotient(&g, xi1, xi2, eta, &spec).unwrap();
                assert!(v.norm() <= m / 1.0 + 1e-12);
            }
        }
    }
}
