//! Sampled univalence and starlikeness certificates on the unit disc.
//!
//! Both criteria are sufficient conditions, so every check answers either
//! [`Certificate::Proven`] or [`Certificate::Inconclusive`]; nothing here
//! ever claims a function is *not* univalent or starlike.
//!
//! - Noshiro–Warschawski: if `Re(e^{iβ} u′(z)) > 0` on the disc for a fixed
//!   real `β`, then `u` is univalent.
//! - Mocanu: if `sup |u′(z) − 1| ≤ √20/5` on the disc, then `u` is starlike.
//!
//! For `f(z, t) = z^(−q) h(z)` with `h(0) = 0` the solution is
//! `u = I^q[z^(−q) h]`, whose derivative is
//!
//! ```text
//! u′(z) = 1/Γ(q) ∫₀¹ t^(1−q) (1−t)^(q−1) h′(zt) dt,
//! ```
//!
//! computed by [`u_prime_from_h`].

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::existence::golden_max;
use crate::fractional::{cauchy_derivative, TOperator};
use crate::series::PowerSeries;
use crate::special::{gamma, jacobi_rule, QuadRule};
use crate::{par, AnalyticFn, FracOrder};

/// `√20/5`, stored as `2/√5`.
pub const MOCANU_BOUND: f64 = 0.894_427_190_999_915_9;

const BETA_GRID: usize = 720;
const CAUCHY_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    Proven,
    Inconclusive,
}

impl Certificate {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Proven
        } else {
            Self::Inconclusive
        }
    }

    pub fn is_proven(self) -> bool {
        self == Self::Proven
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Proven => "proven",
            Self::Inconclusive => "inconclusive",
        }
    }
}

/// Polar sample grid of the open unit disc.
///
/// Radii are `cap · k / radii` for `k = 1..=radii` plus the centre, so the
/// rim `|z| = 1` itself is never sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscGrid {
    pub radii: usize,
    pub angles: usize,
    pub cap: f64,
}

impl Default for DiscGrid {
    fn default() -> Self {
        Self {
            radii: 32,
            angles: 64,
            cap: 1.0 - 1e-3,
        }
    }
}

impl DiscGrid {
    pub fn new(radii: usize, angles: usize) -> Self {
        Self {
            radii,
            angles,
            ..Self::default()
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.radii * self.angles + 1);
        out.push(Complex64::new(0.0, 0.0));
        for k in 1..=self.radii {
            let rho = self.cap * k as f64 / self.radii as f64;
            for j in 0..self.angles {
                out.push(Complex64::from_polar(
                    rho,
                    TAU * j as f64 / self.angles as f64,
                ));
            }
        }
        out
    }

    /// [`points`](Self::points) plus `4 · angles` points on the unit circle,
    /// for sup estimates over the closed disc.
    pub fn closed_points(&self) -> Vec<Complex64> {
        let mut out = self.points();
        let n = 4 * self.angles;
        out.extend((0..n).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64)));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivalenceReport {
    pub certificate: Certificate,
    /// The rotation achieving `min_re_rotated`, in `(−π, π]`.
    pub beta: Option<f64>,
    /// `max_β min_z Re(e^{iβ} u′(z))` over the samples.
    pub min_re_rotated: f64,
}

fn min_rotated(samples: &[Complex64], beta: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, beta);
    samples
        .iter()
        .map(|w| (rot * w).re)
        .fold(f64::INFINITY, f64::min)
}

/// Noshiro–Warschawski check on samples of `u′`.
///
/// Scans `β` on a 720-point grid, refines the best cell by golden section
/// and reports `Proven` iff the best minimum exceeds `tol`.
pub fn check_univalent(uprime_samples: &[Complex64], tol: f64) -> UnivalenceReport {
    if uprime_samples.is_empty()
        || uprime_samples
            .iter()
            .any(|w| !(w.re.is_finite() && w.im.is_finite()))
    {
        return UnivalenceReport {
            certificate: Certificate::Inconclusive,
            beta: None,
            min_re_rotated: f64::NEG_INFINITY,
        };
    }
    let step = TAU / BETA_GRID as f64;
    let scan: Vec<f64> = (0..BETA_GRID)
        .map(|k| min_rotated(uprime_samples, -PI + step * (k + 1) as f64))
        .collect();
    let k = par::argmax(&scan).expect("nonempty");
    let centre = -PI + step * (k + 1) as f64;
    let (mut beta, refined) = golden_max(centre - step, centre + step, |b| {
        min_rotated(uprime_samples, b)
    });
    let (beta_val, value) = if refined > scan[k] {
        (beta, refined)
    } else {
        (centre, scan[k])
    };
    beta = beta_val;
    if beta <= -PI {
        beta += TAU;
    } else if beta > PI {
        beta -= TAU;
    }
    UnivalenceReport {
        certificate: Certificate::from_bool(value > tol),
        beta: Some(beta),
        min_re_rotated: value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarlikeReport {
    pub certificate: Certificate,
    pub sup_uprime_dev: f64,
}

/// Mocanu check on samples of `u′`: proven iff `sup |u′ − 1| ≤ √20/5 + tol`.
pub fn check_starlike_samples(uprime_samples: &[Complex64], tol: f64) -> StarlikeReport {
    let sup = uprime_samples
        .iter()
        .map(|w| (w - 1.0).norm())
        .fold(0.0f64, |a, d| if d.is_nan() { f64::NAN } else { a.max(d) });
    StarlikeReport {
        certificate: Certificate::from_bool(sup <= MOCANU_BOUND + tol),
        sup_uprime_dev: sup,
    }
}

/// `u′` by the Cauchy integral on a circle of radius `min(0.1, 1 − |z|)`.
pub fn cauchy_uprime<U: AnalyticFn + ?Sized>(u: &U, z: Complex64) -> Result<Complex64> {
    let radius = (1.0 - z.norm()).min(0.1);
    if !(radius > 0.0) {
        return Err(Error::Domain {
            what: "derivative point must lie inside the unit disc",
            value: z.norm(),
        });
    }
    cauchy_derivative(u, z, radius, CAUCHY_POINTS)
}

/// Mocanu check for an arbitrary analytic `u`, differentiating numerically.
pub fn check_starlike_mocanu<U: AnalyticFn + ?Sized>(
    u: &U,
    grid: &DiscGrid,
    tol: f64,
) -> Result<StarlikeReport> {
    let samples = par::try_map(&grid.points(), |&z| cauchy_uprime(u, z))?;
    Ok(check_starlike_samples(&samples, tol))
}

/// Mocanu check for a polynomial, differentiating term by term.
pub fn check_starlike_series(u: &PowerSeries, grid: &DiscGrid, tol: f64) -> StarlikeReport {
    let du = u.derivative();
    let samples = par::map(&grid.points(), |&z| du.eval(z));
    check_starlike_samples(&samples, tol)
}

/// Noshiro–Warschawski check for a polynomial.
pub fn check_univalent_series(u: &PowerSeries, grid: &DiscGrid, tol: f64) -> UnivalenceReport {
    let du = u.derivative();
    let samples = par::map(&grid.points(), |&z| du.eval(z));
    check_univalent(&samples, tol)
}

/// Evaluates `u′(z) = 1/Γ(q) ∫₀¹ t^(1−q)(1−t)^(q−1) h′(zt) dt` with an
/// `n`-point Gauss–Jacobi rule.
pub fn u_prime_from_h<H: AnalyticFn + ?Sized>(
    hprime: &H,
    q: FracOrder,
    z: Complex64,
    n: usize,
) -> Result<Complex64> {
    UPrime::new(q, n)?.eval(hprime, z)
}

struct UPrime {
    rule: QuadRule,
    inv_gamma_q: f64,
}

impl UPrime {
    fn new(q: FracOrder, n: usize) -> Result<Self> {
        Ok(Self {
            rule: jacobi_rule(q.get() - 1.0, 1.0 - q.get(), n)?,
            inv_gamma_q: 1.0 / gamma(q.get())?,
        })
    }

    fn eval<H: AnalyticFn + ?Sized>(&self, hprime: &H, z: Complex64) -> Result<Complex64> {
        Ok(self.rule.try_integrate(|t| hprime.eval(z * t))? * self.inv_gamma_q)
    }
}

/// Hypothesis checks on `h` for the univalence and starlikeness criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct HChecks {
    pub h_prime_at_0: Complex64,
    /// Whether `h′(0) = 1/Γ(2−q)` within the tolerance.
    pub matches_1_over_gamma2q: bool,
    /// Noshiro–Warschawski certificate for `h′` itself.
    pub h_univalence: UnivalenceReport,
    /// Sampled `sup |Γ(1−q) h(z) − z/(1−q)|` over the closed disc.
    pub starlike_m: f64,
    pub starlike_m_within_bound: bool,
}

fn require_vanishing<H: AnalyticFn + ?Sized>(h: &H) -> Result<()> {
    let h0 = h.eval(Complex64::new(0.0, 0.0))?;
    if h0.norm() > 1e-12 {
        return Err(Error::Hypothesis(format!("h(0) must vanish, got {h0}")));
    }
    Ok(())
}

/// Checks `h′(0) = 1/Γ(2−q)`, the NW certificate for `h′`, and the
/// starlikeness constant `sup |Γ(1−q)h(z) − z/(1−q)|`.
///
/// Rejects `h` with `h(0) ≠ 0`.
pub fn check_h_hypotheses<H: AnalyticFn + ?Sized>(
    h: &H,
    q: FracOrder,
    grid: &DiscGrid,
    tol: f64,
) -> Result<HChecks> {
    require_vanishing(h)?;
    let qv = q.get();
    let h_prime_at_0 = cauchy_derivative(h, Complex64::new(0.0, 0.0), 0.5, 64)?;
    let target = 1.0 / gamma(2.0 - qv)?;
    let matches = (h_prime_at_0 - target).norm() <= tol * target.max(1.0);

    let hprime = par::try_map(&grid.points(), |&z| cauchy_uprime(h, z))?;
    let h_univalence = check_univalent(&hprime, tol);

    let g1mq = gamma(1.0 - qv)?;
    let devs = par::try_map(&grid.closed_points(), |&z| {
        Ok((g1mq * h.eval(z)? - z / (1.0 - qv)).norm())
    })?;
    let starlike_m = devs.into_iter().fold(0.0, f64::max);
    Ok(HChecks {
        h_prime_at_0,
        matches_1_over_gamma2q: matches,
        h_univalence,
        starlike_m,
        starlike_m_within_bound: starlike_m <= MOCANU_BOUND + tol,
    })
}

/// The solution `u(z) = 1/Γ(q) ∫₀¹ t^(−q)(1−t)^(q−1) h(zt) dt` sampled on
/// `points`.
pub fn solution_from_h<H: AnalyticFn + ?Sized>(
    h: &H,
    q: FracOrder,
    points: &[Complex64],
    n: usize,
) -> Result<Vec<Complex64>> {
    let op = TOperator::new(q, n)?;
    let big_f = |z: Complex64, _t: Complex64| h.eval(z);
    let zero = |_z: Complex64| Complex64::new(0.0, 0.0);
    par::try_map(points, |&z| op.apply(&crate::Fallible(big_f), &zero, z))
}

/// Sampled `sup |u(z) − z|` over the closed disc for the solution built from
/// `h`. Bounded above by [`HChecks::starlike_m`].
pub fn starlike_bound_from_h<H: AnalyticFn + ?Sized>(
    h: &H,
    q: FracOrder,
    grid: &DiscGrid,
    n: usize,
) -> Result<f64> {
    require_vanishing(h)?;
    let pts = grid.closed_points();
    let us = solution_from_h(h, q, &pts, n)?;
    Ok(pts
        .iter()
        .zip(&us)
        .map(|(z, u)| (u - z).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub univalent: Certificate,
    pub beta: Option<f64>,
    pub min_re_rotated: f64,
    pub starlike: Certificate,
    pub sup_uprime_dev: f64,
    pub mocanu_bound: f64,
    pub h_checks: HChecks,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub grid: DiscGrid,
    pub n_quad: usize,
    pub tol: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            grid: DiscGrid::default(),
            n_quad: 48,
            tol: 1e-8,
        }
    }
}

/// Classifies the solution of the `f = z^(−q) h(z)` problem.
///
/// `u′` is sampled on the disc grid via [`u_prime_from_h`], with `h′`
/// obtained from Cauchy integrals of `h`.
pub fn classify_from_h<H: AnalyticFn + ?Sized>(
    h: &H,
    q: FracOrder,
    cfg: &ClassifyConfig,
) -> Result<ClassificationReport> {
    let h_checks = check_h_hypotheses(h, q, &cfg.grid, cfg.tol)?;
    let uprime_op = UPrime::new(q, cfg.n_quad)?;
    let hprime = crate::Fallible(|w: Complex64| cauchy_uprime(h, w));
    let samples = par::try_map(&cfg.grid.points(), |&z| uprime_op.eval(&hprime, z))?;
    let uni = check_univalent(&samples, cfg.tol);
    let star = check_starlike_samples(&samples, cfg.tol);
    Ok(ClassificationReport {
        univalent: uni.certificate,
        beta: uni.beta,
        min_re_rotated: uni.min_re_rotated,
        starlike: star.certificate,
        sup_uprime_dev: star.sup_uprime_dev,
        mocanu_bound: MOCANU_BOUND,
        h_checks,
    })
}
