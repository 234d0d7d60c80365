//! Problem instances, the compatibility condition at the origin, the
//! torus estimate of `M`, and the existence radius `R₀`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, ExprFn2, Param, Var};
use crate::special::gamma;
use crate::{par, AnalyticFn2, FracOrder};

/// A complete instance of `D^q u = f(z, u)`, `u(0) = b` on `|z| < R`, with
/// the state confined to `|t − b| ≤ r`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    q: FracOrder,
    b: Complex64,
    f_expr: Expr,
    scaled: Expr,
    outer_radius: f64,
    ball_radius: f64,
}

impl ProblemSpec {
    /// Builds a spec from `f(z, t)`. `z^q f` is derived symbolically, so an
    /// explicit `z^(−q)` factor in `f` cancels and the product can be
    /// evaluated at the origin.
    pub fn new(
        q: FracOrder,
        b: Complex64,
        f: Expr,
        outer_radius: f64,
        ball_radius: f64,
    ) -> Result<Self> {
        if f.mentions_var(Var::X) || f.mentions_var(Var::Y) {
            return Err(Error::Config(
                "f must be written in z and t (x and y are accepted only by the real-line bridge)"
                    .into(),
            ));
        }
        let scaled = f.bind_q(q.get()).times_z_power(q.get());
        Self::assemble(q, b, f, scaled, outer_radius, ball_radius)
    }

    pub fn parse(
        q: FracOrder,
        b: Complex64,
        f: &str,
        outer_radius: f64,
        ball_radius: f64,
    ) -> Result<Self> {
        Self::new(q, b, parse(f)?, outer_radius, ball_radius)
    }

    /// Builds a spec directly from `F(z, t) = z^q f(z, t)`.
    pub fn from_scaled(
        q: FracOrder,
        b: Complex64,
        scaled: Expr,
        outer_radius: f64,
        ball_radius: f64,
    ) -> Result<Self> {
        let scaled = scaled.bind_q(q.get());
        let f = scaled.times_z_power(-q.get());
        Self::assemble(q, b, f, scaled, outer_radius, ball_radius)
    }

    fn assemble(
        q: FracOrder,
        b: Complex64,
        f_expr: Expr,
        scaled: Expr,
        outer_radius: f64,
        ball_radius: f64,
    ) -> Result<Self> {
        if !(outer_radius > 0.0 && outer_radius.is_finite()) {
            return Err(Error::Domain {
                what: "outer radius R must be positive",
                value: outer_radius,
            });
        }
        if !(ball_radius > 0.0 && ball_radius.is_finite()) {
            return Err(Error::Domain {
                what: "ball radius r must be positive",
                value: ball_radius,
            });
        }
        if !(b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::Domain {
                what: "initial value b must be finite",
                value: b.norm(),
            });
        }
        Ok(Self {
            q,
            b,
            f_expr,
            scaled,
            outer_radius,
            ball_radius,
        })
    }

    pub fn order(&self) -> FracOrder {
        self.q
    }

    pub fn initial_value(&self) -> Complex64 {
        self.b
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    /// The right-hand side `f` as supplied.
    pub fn f_expr(&self) -> &Expr {
        &self.f_expr
    }

    /// `F = z^q f` with `q` substituted.
    pub fn scaled_expr(&self) -> &Expr {
        &self.scaled
    }

    /// `F(z, t)` as a callable with `q` and `b` bound.
    pub fn scaled_fn(&self) -> ExprFn2 {
        ExprFn2 {
            expr: self.scaled.clone(),
            q: Some(self.q.get()),
            b: Some(self.b),
        }
    }

    /// `f(z, t)` as a callable with `q` and `b` bound.
    pub fn f_fn(&self) -> ExprFn2 {
        ExprFn2 {
            expr: self.f_expr.clone(),
            q: Some(self.q.get()),
            b: Some(self.b),
        }
    }

    /// `b / Γ(1−q)`, the value `F(0, b)` must take.
    pub fn compatible_value(&self) -> Complex64 {
        self.b / gamma(1.0 - self.q.get()).expect("1 - q > 0")
    }

    /// True if `f` has no imaginary unit and does not reference `b`, so its
    /// restriction to real arguments is real.
    pub fn has_real_coefficients(&self) -> bool {
        !self.f_expr.mentions_i() && (!self.f_expr.mentions_param(Param::B) || self.b.im == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionIvReport {
    pub pass: bool,
    /// Circle mean of `F(z, b)` on the smallest sampled radius.
    pub observed_limit: Complex64,
    pub target: Complex64,
    /// Largest `|mean − target|` over the sampled radii.
    pub max_deviation: f64,
}

/// Radii (relative to `R`) at which condition (iv) is sampled.
pub const CONDITION_IV_RADII: [f64; 3] = [1e-3, 1e-5, 1e-7];
const CONDITION_IV_ANGLES: usize = 8;

/// Checks `z^q f(z, b) → b/Γ(1−q)` as `z → 0`.
///
/// `F(·, b)` is sampled on 8 equally spaced points of each small circle and
/// averaged; for analytic `F` the mean equals `F(0, b)` up to terms of
/// order `ρ^8`. The angles are offset by half a step so that no sample
/// sits on the negative real axis. Passes iff every circle mean lies within
/// `tol · max(1, |target|)` of the target. Evaluation failures mean `F` is
/// not continuous at the origin and are reported as condition (iii).
pub fn check_condition_iv(spec: &ProblemSpec, tol: f64) -> Result<ConditionIvReport> {
    let big_f = spec.scaled_fn();
    let target = spec.compatible_value();
    let scale = target.norm().max(1.0);
    let mut observed = target;
    let mut max_dev: f64 = 0.0;
    for &rel in &CONDITION_IV_RADII {
        let rho = rel * spec.outer_radius;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..CONDITION_IV_ANGLES {
            let theta = TAU * (k as f64 + 0.5) / CONDITION_IV_ANGLES as f64;
            let z = Complex64::from_polar(rho, theta);
            let v = big_f.eval2(z, spec.b).map_err(|e| {
                Error::ConditionIII(format!("z^q f(z, b) cannot be evaluated near z = 0: {e}"))
            })?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::ConditionIII(format!(
                    "z^q f(z, b) is not finite at |z| = {rho:e}"
                )));
            }
            sum += v;
        }
        observed = sum / CONDITION_IV_ANGLES as f64;
        max_dev = max_dev.max((observed - target).norm());
    }
    Ok(ConditionIvReport {
        pass: max_dev <= tol * scale,
        observed_limit: observed,
        target,
        max_deviation: max_dev,
    })
}

/// Converts a failed condition-(iv) report into an error.
pub fn require_condition_iv(spec: &ProblemSpec, tol: f64) -> Result<ConditionIvReport> {
    let rep = check_condition_iv(spec, tol)?;
    if rep.pass {
        Ok(rep)
    } else {
        Err(Error::ConditionIV {
            observed: rep.observed_limit,
            target: rep.target,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MEstimate {
    pub m: f64,
    pub argmax: (Complex64, Complex64),
}

const GOLDEN_ITERS: usize = 60;
const REFINE_SWEEPS: usize = 40;
const REFINE_CANDIDATES: usize = 8;

/// Golden-section maximization of `phi` on `[lo, hi]`.
pub(crate) fn golden_max(lo: f64, hi: f64, phi: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes `|g(R e^{iθ₁}, b + r e^{iθ₂})|` over the torus: a
/// `grid_n × grid_n` angle scan, then coordinate-wise golden-section
/// refinement from the best grid-local maxima.
pub fn torus_max<G: AnalyticFn2 + ?Sized>(
    g: &G,
    outer_radius: f64,
    center: Complex64,
    ball_radius: f64,
    grid_n: usize,
) -> Result<MEstimate> {
    let grid_n = grid_n.max(4);
    let step = TAU / grid_n as f64;
    let point = |t1: f64, t2: f64| {
        (
            Complex64::from_polar(outer_radius, t1),
            center + Complex64::from_polar(ball_radius, t2),
        )
    };
    let modulus = |t1: f64, t2: f64| -> Result<f64> {
        let (z, t) = point(t1, t2);
        Ok(g.eval2(z, t)?.norm())
    };

    let rows: Vec<usize> = (0..grid_n).collect();
    let values = par::try_map(&rows, |&j| {
        (0..grid_n)
            .map(|k| modulus(step * j as f64, step * k as f64))
            .collect::<Result<Vec<f64>>>()
    })?;
    let flat: Vec<f64> = values.into_iter().flatten().collect();

    // Grid cells that dominate their eight periodic neighbours.
    let at = |j: usize, k: usize| flat[(j % grid_n) * grid_n + (k % grid_n)];
    let mut order: Vec<usize> = (0..flat.len())
        .filter(|&idx| {
            let (j, k) = (idx / grid_n + grid_n, idx % grid_n + grid_n);
            let v = flat[idx];
            [
                (j - 1, k - 1),
                (j - 1, k),
                (j - 1, k + 1),
                (j, k - 1),
                (j, k + 1),
                (j + 1, k - 1),
                (j + 1, k),
                (j + 1, k + 1),
            ]
            .iter()
            .all(|&(a, b)| v >= at(a, b) || v.is_nan())
        })
        .collect();
    if order.is_empty() {
        order = (0..flat.len()).collect();
    }
    order.sort_by(|&a, &b| flat[b].total_cmp(&flat[a]).then(a.cmp(&b)));

    let mut best = (flat[order[0]], 0.0, 0.0);
    best.1 = step * (order[0] / grid_n) as f64;
    best.2 = step * (order[0] % grid_n) as f64;

    // Refine failures fall back to the grid value.
    let safe = |t1: f64, t2: f64| modulus(t1, t2).unwrap_or(f64::NEG_INFINITY);
    for &idx in order.iter().take(REFINE_CANDIDATES) {
        let mut t1 = step * (idx / grid_n) as f64;
        let mut t2 = step * (idx % grid_n) as f64;
        let mut val = flat[idx];
        for _ in 0..REFINE_SWEEPS {
            let start = val;
            let (a, fa) = golden_max(t1 - step, t1 + step, |s| safe(s, t2));
            if fa > val {
                t1 = a;
                val = fa;
            }
            let (b2, fb) = golden_max(t2 - step, t2 + step, |s| safe(t1, s));
            if fb > val {
                t2 = b2;
                val = fb;
            }
            if val - start <= 1e-15 * val.abs() {
                break;
            }
        }
        if val > best.0 {
            best = (val, t1, t2);
        }
    }
    Ok(MEstimate {
        m: best.0,
        argmax: point(best.1, best.2),
    })
}

/// Estimates `M = sup |z^q f(z, t) − b/Γ(1−q)|` over the closed bidisc from
/// its distinguished boundary `|z| = R`, `|t − b| = r`.
pub fn estimate_m(spec: &ProblemSpec, grid_n: usize) -> Result<MEstimate> {
    let big_f = spec.scaled_fn();
    let target = spec.compatible_value();
    let g = crate::Fallible(|z: Complex64, t: Complex64| Ok(big_f.eval2(z, t)? - target));
    torus_max(&g, spec.outer_radius, spec.b, spec.ball_radius, grid_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusBranch {
    /// `MΓ(2−q) ≤ r`: existence on the whole disc.
    Full,
    /// `r < MΓ(2−q)`: the disc shrinks to `rR/(MΓ(2−q))`.
    Shrunk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusResult {
    pub r0: f64,
    pub branch: RadiusBranch,
    pub m: f64,
    pub gamma_2mq: f64,
}

/// Relative margin of the branch decision in [`radius_r0`].
pub const BRANCH_SLACK: f64 = 1e-12;

/// The existence radius
///
/// ```text
/// R₀ = R                  if MΓ(2−q) ≤ r
/// R₀ = rR / (MΓ(2−q))     if r < MΓ(2−q)
/// ```
///
/// `MΓ(2−q)` within a relative [`BRANCH_SLACK`] of `r` counts as the full
/// branch, so that an `M` estimated a few ulps high does not shrink the
/// disc by a rounding error.
pub fn radius_r0(
    m: f64,
    q: FracOrder,
    outer_radius: f64,
    ball_radius: f64,
) -> Result<RadiusResult> {
    if !(m >= 0.0) || m.is_infinite() {
        return Err(Error::Domain {
            what: "M must be finite and nonnegative",
            value: m,
        });
    }
    if !(outer_radius > 0.0) || !(ball_radius > 0.0) {
        return Err(Error::Domain {
            what: "radii must be positive",
            value: outer_radius.min(ball_radius),
        });
    }
    let gamma_2mq = gamma(2.0 - q.get())?;
    let load = m * gamma_2mq;
    Ok(if load <= ball_radius * (1.0 + BRANCH_SLACK) {
        RadiusResult {
            r0: outer_radius,
            branch: RadiusBranch::Full,
            m,
            gamma_2mq,
        }
    } else {
        RadiusResult {
            r0: ball_radius * outer_radius / load,
            branch: RadiusBranch::Shrunk,
            m,
            gamma_2mq,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlainBound {
    pub bound: f64,
    pub sufficient: bool,
}

/// The plain sup bound `|Tu| ≤ MΓ(1−q)` available without the Schwarz
/// argument (setting `b = 0`), and whether it alone keeps `T` inside the
/// `r`-ball.
pub fn plain_bound(q: FracOrder, m_sup: f64, ball_radius: f64) -> Result<PlainBound> {
    let bound = m_sup * gamma(1.0 - q.get())?;
    Ok(PlainBound {
        bound,
        sufficient: bound <= ball_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    const EXAMPLE: &str = "z^(-q)*(t + (q/(1-q))*z)/gamma(1-q)";

    #[test]
    fn example_passes_condition_iv() {
        let spec = ProblemSpec::parse(q(0.5), c(1.0, 0.0), EXAMPLE, 1.0, 1.0).unwrap();
        let rep = check_condition_iv(&spec, 1e-6).unwrap();
        assert!(rep.pass);
        assert!((rep.observed_limit - rep.target).norm() < 1e-14);
        assert_relative_eq!(
            rep.target.re,
            1.0 / gamma(0.5).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn plain_t_violates_condition_iv() {
        let spec = ProblemSpec::parse(q(0.5), c(1.0, 0.0), "t", 1.0, 1.0).unwrap();
        let rep = check_condition_iv(&spec, 1e-6).unwrap();
        assert!(!rep.pass);
        assert!(rep.observed_limit.norm() < 1e-3);
        assert!(matches!(
            require_condition_iv(&spec, 1e-6),
            Err(Error::ConditionIV { .. })
        ));
    }

    #[test]
    fn zero_initial_value_trivially_compatible() {
        let spec = ProblemSpec::parse(q(0.3), c(0.0, 0.0), "z^(1-q)*t", 1.0, 1.0).unwrap();
        assert!(check_condition_iv(&spec, 1e-6).unwrap().pass);
    }

    #[test]
    fn singular_scaled_function_is_condition_iii() {
        let spec = ProblemSpec::parse(q(0.5), c(1.0, 0.0), "t/z", 1.0, 1.0).unwrap();
        let rep = check_condition_iv(&spec, 1e-6).unwrap();
        assert!(!rep.pass);
        let spec = ProblemSpec::parse(q(0.5), c(1.0, 0.0), "t/(z - z)", 1.0, 1.0).unwrap();
        assert!(matches!(
            check_condition_iv(&spec, 1e-6),
            Err(Error::ConditionIII(_))
        ));
    }

    #[test]
    fn rotation_harness_identity() {
        let base = crate::expr::parse(EXAMPLE).unwrap();
        for theta in [0.3, 1.7, -2.9] {
            let rot = crate::expr::parse(&format!("z*exp(i*{theta})*exp(-i*{theta})")).unwrap();
            let rotated = base.substitute(Var::Z, &rot);
            let spec = ProblemSpec::new(q(0.4), c(0.7, -0.2), rotated, 1.0, 1.0).unwrap();
            assert!(check_condition_iv(&spec, 1e-6).unwrap().pass);
        }
    }

    #[test]
    fn m_examples() {
        let spec = ProblemSpec::from_scaled(
            q(0.5),
            c(1.0, 0.5),
            crate::expr::parse("b/gamma(1-q)").unwrap(),
            1.0,
            1.0,
        )
        .unwrap();
        assert!(estimate_m(&spec, 32).unwrap().m < 1e-15);

        let spec = ProblemSpec::from_scaled(
            q(0.5),
            c(1.0, 0.5),
            crate::expr::parse("b/gamma(1-q) + z/2").unwrap(),
            2.0,
            1.0,
        )
        .unwrap();
        assert_relative_eq!(estimate_m(&spec, 32).unwrap().m, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn m_for_example_against_dense_grid() {
        let spec = ProblemSpec::parse(q(0.5), c(1.0, 0.0), EXAMPLE, 1.0, 1.0).unwrap();
        let est = estimate_m(&spec, 64).unwrap();
        // sup |t - 1 + z| / Γ(1/2) over the torus = 2/Γ(1/2)
        assert_relative_eq!(
            est.m,
            std::f64::consts::FRAC_2_SQRT_PI,
            max_relative = 1e-12
        );

        // brute force on 1000 x 1000 torus points
        let big_f = spec.scaled_fn();
        let target = spec.compatible_value();
        let n = 1000;
        let mut brute: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let z = Complex64::from_polar(1.0, TAU * j as f64 / n as f64 + 0.001);
                let t = c(1.0, 0.0) + Complex64::from_polar(1.0, TAU * k as f64 / n as f64 + 0.002);
                brute = brute.max((big_f.eval2(z, t).unwrap() - target).norm());
            }
        }
        assert!(brute <= est.m + 1e-12);
        assert!(est.m - brute < 1e-5);
    }

    #[test]
    fn radius_examples() {
        let r = radius_r0(2.0, q(0.5), 1.0, 1.0).unwrap();
        assert_eq!(r.branch, RadiusBranch::Shrunk);
        assert_relative_eq!(r.r0, 0.564_189_583_547_756_3, max_relative = 1e-12);

        let r = radius_r0(0.0, q(0.5), 3.0, 1.0).unwrap();
        assert_eq!((r.r0, r.branch), (3.0, RadiusBranch::Full));

        // MΓ(2−q) = r exactly: q = 1/2, M = 2/Γ(3/2)... use the split point
        let g = gamma(1.5).unwrap();
        let r = radius_r0(0.75 / g, q(0.5), 2.0, 0.75).unwrap();
        assert_eq!(r.branch, RadiusBranch::Full);
        assert_eq!(r.r0, 2.0);
        // the shrunk formula evaluated at the same point gives R as well
        assert_relative_eq!(0.75 * 2.0 / ((0.75 / g) * g), 2.0, max_relative = 1e-15);

        assert!(radius_r0(-1.0, q(0.5), 1.0, 1.0).is_err());
        assert!(radius_r0(1.0, q(0.5), 0.0, 1.0).is_err());
    }

    #[test]
    fn plain_bound_examples() {
        let r = plain_bound(q(0.5), 0.0, 1.0).unwrap();
        assert_eq!((r.bound, r.sufficient), (0.0, true));
        let r = plain_bound(q(0.5), 1.0, 1.0).unwrap();
        assert_relative_eq!(r.bound, 1.772_453_850_905_516, max_relative = 1e-14);
        assert!(!r.sufficient);
        let r = plain_bound(q(0.9), 0.5, 1.0).unwrap();
        assert_relative_eq!(r.bound, 4.756_753_849_334_366, max_relative = 1e-13);
        assert!(!r.sufficient);
    }

    #[test]
    fn rejects_real_line_variables_and_bad_radii() {
        assert!(ProblemSpec::parse(q(0.5), c(1.0, 0.0), "x*y", 1.0, 1.0).is_err());
        assert!(ProblemSpec::parse(q(0.5), c(1.0, 0.0), "t", -1.0, 1.0).is_err());
        assert!(ProblemSpec::parse(q(0.5), c(1.0, 0.0), "t", 1.0, 0.0).is_err());
    }
}
