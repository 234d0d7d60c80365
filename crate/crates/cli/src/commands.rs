use clap::ValueEnum;
use fracdisc::bridge::{bridge_solve, extend_problem};
use fracdisc::existence::{
    check_condition_iv, estimate_m, plain_bound, radius_r0, torus_max, ConditionIvReport,
    RadiusBranch,
};
use fracdisc::expr::{parse, ExprFn, ExprFn2};
use fracdisc::fractional::{
    cauchy_derivative, derivative_of_integral_quad, frac_derivative_series, frac_integral_series,
    integral_of_derivative_quad, FracDifferentiator, FracIntegrator,
};
use fracdisc::geometry::{classify_from_h, ClassifyConfig, DiscGrid};
use fracdisc::schwarz::{schwarz2_check, BidiscSpec, SampleGrid};
use fracdisc::series::PowerSeries;
use fracdisc::solver::{solve, SolverConfig};
use fracdisc::{AnalyticFn, Complex64, Fallible, FracOrder};
use serde_json::{json, Value};

use crate::output::{cx, cx_cells, cx_json, num, Csv, Output, Report};
use crate::specfile::SpecFile;
use crate::{exit, CliError};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub n_quad: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub grid: Option<(usize, usize)>,
}

impl Overrides {
    fn solver_config(&self, file: &SpecFile) -> SolverConfig {
        let mut cfg = file.solver_config();
        if let Some(n) = self.n_quad {
            cfg.n_quad = n;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        if let Some((nr, nt)) = self.grid {
            cfg.n_rad = nr;
            cfg.n_theta = nt;
        }
        cfg
    }

    fn torus_grid(&self, file: &SpecFile) -> Result<usize, CliError> {
        match self.grid {
            Some((n, m)) if n != m => Err(CliError::Other(format!(
                "the torus scan needs a square grid, got {n}x{m}"
            ))),
            Some((n, _)) => Ok(n),
            None => Ok(file.solver_config().torus_grid),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    /// Fractional integral I^q
    #[value(name = "I")]
    I,
    /// Fractional derivative D^q
    #[value(name = "D")]
    D,
    /// D^q applied to I^q u
    #[value(name = "DI")]
    Di,
    /// I^q applied to D^q u
    #[value(name = "ID")]
    Id,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::D => "D",
            Self::Di => "DI",
            Self::Id => "ID",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Quad,
    Series,
}

pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Parse(format!("expected `re` or `re,im`, got `{s}`"));
    let mut parts = s.split(',');
    let re: f64 = parts
        .next()
        .ok_or_else(bad)?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn parse_coeffs(s: &str) -> Result<PowerSeries, CliError> {
    let coeffs = s
        .split(';')
        .map(|c| parse_complex(c.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PowerSeries::new(coeffs, f64::INFINITY)?)
}

pub struct OpsInput<'a> {
    pub op: Op,
    pub q: f64,
    pub expr: Option<&'a str>,
    pub coeffs: Option<&'a str>,
    pub points: &'a [String],
    pub method: Option<Method>,
}

fn cauchy_step(w: Complex64) -> f64 {
    1e-2 * w.norm().max(1.0)
}

pub fn ops(input: &OpsInput<'_>, ov: &Overrides) -> Result<Output, CliError> {
    let q = FracOrder::new(input.q)?;
    let n = ov.n_quad.unwrap_or(48);
    let points = input
        .points
        .iter()
        .map(|s| parse_complex(s))
        .collect::<Result<Vec<_>, _>>()?;
    if points.is_empty() {
        return Err(CliError::Other(
            "no evaluation points given (use --z)".into(),
        ));
    }

    let (values, method, source) = match (input.expr, input.coeffs) {
        (Some(_), Some(_)) => {
            return Err(CliError::Other(
                "give either --expr or --coeffs, not both".into(),
            ))
        }
        (None, None) => return Err(CliError::Other("give --expr or --coeffs".into())),
        (None, Some(c)) => {
            let u = parse_coeffs(c)?;
            let method = input.method.unwrap_or(Method::Series);
            let values = match method {
                Method::Series => series_values(input.op, &u, q, &points)?,
                Method::Quad => {
                    let du = u.derivative();
                    quad_values(input.op, &u, &du, q, &points, n)?
                }
            };
            (values, method, format!("coeffs {c}"))
        }
        (Some(e), None) => {
            let method = input.method.unwrap_or(Method::Quad);
            if method == Method::Series {
                return Err(CliError::Other("the series method needs --coeffs".into()));
            }
            let u = ExprFn {
                expr: parse(e)?.bind_q(input.q),
                q: Some(input.q),
                b: None,
            };
            let du = Fallible(|w: Complex64| cauchy_derivative(&u, w, cauchy_step(w), 32));
            (
                quad_values(input.op, &u, &du, q, &points, n)?,
                method,
                format!("expr {e}"),
            )
        }
    };

    let mut report = Report::new("fractional operator");
    report
        .line("op", input.op.name())
        .real("q", input.q)
        .line("input", &source)
        .line(
            "method",
            if method == Method::Series {
                "series"
            } else {
                "quad"
            },
        );
    let mut csv = Csv::new(&["z_re", "z_im", "val_re", "val_im"]);
    let mut rows = Vec::new();
    for (&z, &v) in points.iter().zip(&values) {
        report.line(&format!("value at {}", cx(z)), cx(v));
        let [zr, zi] = cx_cells(z);
        let [vr, vi] = cx_cells(v);
        csv.row(&[zr, zi, vr, vi]);
        rows.push(json!({"z": cx_json(z), "value": cx_json(v)}));
    }
    let json = json!({
        "op": input.op.name(),
        "q": input.q,
        "method": if method == Method::Series { "series" } else { "quad" },
        "values": rows,
    });
    Ok(Output::new(report, csv, json))
}

fn series_values(
    op: Op,
    u: &PowerSeries,
    q: FracOrder,
    points: &[Complex64],
) -> Result<Vec<Complex64>, CliError> {
    let s = match op {
        Op::I => frac_integral_series(u, q),
        Op::D => frac_derivative_series(u, q),
        Op::Di => frac_integral_series(u, q).frac_derivative(q)?,
        Op::Id => frac_derivative_series(u, q).frac_integral(q)?,
    };
    Ok(points
        .iter()
        .map(|&z| s.eval(z))
        .collect::<Result<Vec<_>, _>>()?)
}

fn quad_values<U, V>(
    op: Op,
    u: &U,
    du: &V,
    q: FracOrder,
    points: &[Complex64],
    n: usize,
) -> Result<Vec<Complex64>, CliError>
where
    U: AnalyticFn + ?Sized,
    V: AnalyticFn + ?Sized,
{
    let integ = FracIntegrator::new(q, n)?;
    let diff = FracDifferentiator::new(q, n)?;
    let out = fracdisc::par::try_map(points, |&z| match op {
        Op::I => integ.eval(u, z),
        Op::D => diff.eval(u, du, z),
        Op::Di => derivative_of_integral_quad(u, du, q, z, n),
        Op::Id => integral_of_derivative_quad(u, du, q, z, n),
    })?;
    Ok(out)
}

fn condition_json(c: &ConditionIvReport) -> Value {
    json!({
        "pass": c.pass,
        "observed_limit": cx_json(c.observed_limit),
        "target": cx_json(c.target),
        "max_deviation": c.max_deviation,
    })
}

fn condition_lines(report: &mut Report, c: &ConditionIvReport) {
    report
        .line("condition_iv", if c.pass { "pass" } else { "fail" })
        .complex("observed_limit", c.observed_limit)
        .complex("target", c.target)
        .real("max_deviation", c.max_deviation);
}

fn branch_name(b: RadiusBranch) -> &'static str {
    match b {
        RadiusBranch::Full => "full",
        RadiusBranch::Shrunk => "shrunk",
    }
}

fn condition_tol(file: &SpecFile, ov: &Overrides) -> f64 {
    ov.tol.unwrap_or(file.solver_config().condition_tol)
}

pub fn radius(file: &SpecFile, ov: &Overrides) -> Result<Output, CliError> {
    let spec = file.problem()?;
    let cond = check_condition_iv(&spec, condition_tol(file, ov))?;
    let m = estimate_m(&spec, ov.torus_grid(file)?)?;
    let rad = radius_r0(m.m, spec.order(), spec.outer_radius(), spec.ball_radius())?;

    let mut report = Report::new("existence radius");
    report
        .real("M", m.m)
        .complex("argmax_z", m.argmax.0)
        .complex("argmax_t", m.argmax.1)
        .real("gamma_2mq", rad.gamma_2mq)
        .real("R0", rad.r0)
        .line("branch", branch_name(rad.branch));
    condition_lines(&mut report, &cond);
    let mut extra = json!(null);
    if spec.initial_value() == Complex64::new(0.0, 0.0) {
        let rem = plain_bound(spec.order(), m.m, spec.ball_radius())?;
        report
            .real("plain_bound", rem.bound)
            .line("plain_bound_sufficient", rem.sufficient);
        extra = json!({"bound": rem.bound, "sufficient": rem.sufficient});
    }

    let mut csv = Csv::new(&[
        "M",
        "argmax_z_re",
        "argmax_z_im",
        "argmax_t_re",
        "argmax_t_im",
        "R0",
        "branch",
        "gamma_2mq",
        "condition_iv",
        "observed_re",
        "observed_im",
        "target_re",
        "target_im",
        "max_deviation",
    ]);
    let [zr, zi] = cx_cells(m.argmax.0);
    let [tr, ti] = cx_cells(m.argmax.1);
    let [or, oi] = cx_cells(cond.observed_limit);
    let [gr, gi] = cx_cells(cond.target);
    csv.row(&[
        num(m.m),
        zr,
        zi,
        tr,
        ti,
        num(rad.r0),
        branch_name(rad.branch).into(),
        num(rad.gamma_2mq),
        cond.pass.to_string(),
        or,
        oi,
        gr,
        gi,
        num(cond.max_deviation),
    ]);
    let json = json!({
        "M": m.m,
        "argmax": [cx_json(m.argmax.0), cx_json(m.argmax.1)],
        "R0": rad.r0,
        "branch": branch_name(rad.branch),
        "gamma_2mq": rad.gamma_2mq,
        "condition_iv": condition_json(&cond),
        "plain_bound": extra,
    });
    Ok(Output::new(report, csv, json))
}

pub fn check(file: &SpecFile, ov: &Overrides) -> Result<Output, CliError> {
    let spec = file.problem()?;
    let tol = condition_tol(file, ov);
    let cond = check_condition_iv(&spec, tol)?;
    let mut report = Report::new("initial value compatibility");
    report.real("tol", tol);
    condition_lines(&mut report, &cond);
    let mut csv = Csv::new(&[
        "pass",
        "observed_re",
        "observed_im",
        "target_re",
        "target_im",
        "max_deviation",
    ]);
    let [or, oi] = cx_cells(cond.observed_limit);
    let [gr, gi] = cx_cells(cond.target);
    csv.row(&[
        cond.pass.to_string(),
        or,
        oi,
        gr,
        gi,
        num(cond.max_deviation),
    ]);
    let out = Output::new(report, csv, condition_json(&cond));
    Ok(if cond.pass {
        out
    } else {
        out.with_exit(exit::CONDITION)
    })
}

pub fn solve_cmd(file: &SpecFile, ov: &Overrides) -> Result<Output, CliError> {
    let spec = file.problem()?;
    let cfg = ov.solver_config(file);
    let sol = solve(&spec, &cfg)?;

    let mut report = Report::new("solution");
    report
        .real("q", spec.order().get())
        .complex("b", spec.initial_value())
        .real("R", spec.outer_radius())
        .real("r", spec.ball_radius())
        .real("M", sol.m_estimate.m)
        .real("R0", sol.r0())
        .line("branch", branch_name(sol.radius.branch));
    condition_lines(&mut report, &sol.condition_iv);
    report
        .line("iterations", sol.iterations)
        .real("residual", sol.residual)
        .line("converged", sol.converged)
        .section("coefficients");
    for (k, a) in sol.poly.coeffs().iter().enumerate() {
        report.complex(&format!("a{k}"), *a);
    }

    let mut csv = Csv::new(&["z_re", "z_im", "u_re", "u_im"]);
    for &(z, u) in &sol.grid {
        let [zr, zi] = cx_cells(z);
        let [ur, ui] = cx_cells(u);
        csv.row(&[zr, zi, ur, ui]);
    }
    let json = json!({
        "q": spec.order().get(),
        "b": cx_json(spec.initial_value()),
        "R": spec.outer_radius(),
        "r": spec.ball_radius(),
        "M": sol.m_estimate.m,
        "R0": sol.r0(),
        "branch": branch_name(sol.radius.branch),
        "condition_iv": condition_json(&sol.condition_iv),
        "coefficients": sol.poly.coeffs().iter().map(|a| cx_json(*a)).collect::<Vec<_>>(),
        "iterations": sol.iterations,
        "residual": sol.residual,
        "converged": sol.converged,
        "grid": sol.grid.iter().map(|&(z, u)| json!({"z": cx_json(z), "u": cx_json(u)})).collect::<Vec<_>>(),
    });
    let out = Output::new(report, csv, json);
    Ok(if sol.converged {
        out
    } else {
        let mut out = out.with_exit(exit::NONCONVERGENCE);
        out.warnings.push(format!(
            "Picard iteration did not converge after {} iterations (residual {:.3e}); reporting the best iterate. Try a smaller damping.",
            sol.iterations, sol.residual
        ));
        out
    })
}

pub fn classify(file: &SpecFile, ov: &Overrides) -> Result<Output, CliError> {
    let q = file.order()?;
    let h = ExprFn {
        expr: file.h_expr()?,
        q: Some(q.get()),
        b: Some(file.initial_value()),
    };
    let defaults = ClassifyConfig::default();
    let grid = match ov.grid {
        Some((nr, nt)) => DiscGrid::new(nr, nt),
        None => file.disc_grid(),
    };
    let cfg = ClassifyConfig {
        grid,
        n_quad: ov.n_quad.unwrap_or(defaults.n_quad),
        tol: ov.tol.unwrap_or(defaults.tol),
    };
    let rep = classify_from_h(&h, q, &cfg)?;
    let hc = &rep.h_checks;

    let mut report = Report::new("geometric classification");
    report
        .line("univalent", rep.univalent.as_str())
        .line("beta", rep.beta.map_or("none".to_string(), num))
        .real("min_re_rotated", rep.min_re_rotated)
        .line("starlike", rep.starlike.as_str())
        .real("sup_uprime_dev", rep.sup_uprime_dev)
        .line(
            "mocanu_bound",
            format!("sqrt(20)/5 = {}", num(rep.mocanu_bound)),
        )
        .section("hypotheses on h")
        .complex("h_prime_at_0", hc.h_prime_at_0)
        .line("matches_1_over_gamma2q", hc.matches_1_over_gamma2q)
        .line("h_prime_half_plane", hc.h_univalence.certificate.as_str())
        .real("starlike_m", hc.starlike_m)
        .line("starlike_m_within_bound", hc.starlike_m_within_bound);

    let mut csv = Csv::new(&[
        "univalent",
        "beta",
        "min_re_rotated",
        "starlike",
        "sup_uprime_dev",
        "mocanu_bound",
        "h_prime_at_0_re",
        "h_prime_at_0_im",
        "matches_1_over_gamma2q",
        "starlike_m",
    ]);
    let [hr, hi] = cx_cells(hc.h_prime_at_0);
    csv.row(&[
        rep.univalent.as_str().into(),
        rep.beta.map_or(String::new(), num),
        num(rep.min_re_rotated),
        rep.starlike.as_str().into(),
        num(rep.sup_uprime_dev),
        num(rep.mocanu_bound),
        hr,
        hi,
        hc.matches_1_over_gamma2q.to_string(),
        num(hc.starlike_m),
    ]);
    let json = json!({
        "univalent": rep.univalent.as_str(),
        "beta": rep.beta,
        "min_re_rotated": rep.min_re_rotated,
        "starlike": rep.starlike.as_str(),
        "sup_uprime_dev": rep.sup_uprime_dev,
        "mocanu_bound": rep.mocanu_bound,
        "h_checks": {
            "h_prime_at_0": cx_json(hc.h_prime_at_0),
            "matches_1_over_gamma2q": hc.matches_1_over_gamma2q,
            "h_prime_half_plane": hc.h_univalence.certificate.as_str(),
            "starlike_m": hc.starlike_m,
            "starlike_m_within_bound": hc.starlike_m_within_bound,
        },
    });
    Ok(Output::new(report, csv, json))
}

pub struct SchwarzInput<'a> {
    pub g: &'a str,
    pub m: Option<f64>,
    pub outer_radius: f64,
    pub ball_radius: f64,
    pub b: Complex64,
    pub q: Option<f64>,
}

pub fn schwarz(input: &SchwarzInput<'_>, ov: &Overrides) -> Result<Output, CliError> {
    let mut expr = parse(input.g)?;
    if let Some(q) = input.q {
        expr = expr.bind_q(q);
    }
    let g = ExprFn2 {
        expr,
        q: input.q,
        b: Some(input.b),
    };
    let spec = BidiscSpec::new(input.outer_radius, input.ball_radius, input.b)?;
    let (m, estimated) = match input.m {
        Some(m) => (m, false),
        None => (
            torus_max(&g, spec.outer_radius, spec.center, spec.ball_radius, 128)?.m,
            true,
        ),
    };
    let grid = match ov.grid {
        Some((nr, nt)) => SampleGrid::new(nr, nt),
        None => SampleGrid::default(),
    };
    let tol = ov.tol.unwrap_or(1e-9);
    let rep = schwarz2_check(&g, m, &spec, &grid, tol)?;

    let mut report = Report::new("two-variable Schwarz bound");
    report
        .real("M", m)
        .line(
            "M_source",
            if estimated { "torus estimate" } else { "given" },
        )
        .line("checked", rep.checked)
        .real("worst_ratio", rep.worst_ratio)
        .complex("worst_z", rep.worst_point.0)
        .complex("worst_t", rep.worst_point.1)
        .real("max_modulus", rep.max_modulus)
        .line("bounded_by_M", rep.bounded_by_m)
        .line("pass", rep.pass);
    let mut csv = Csv::new(&[
        "M",
        "checked",
        "worst_ratio",
        "worst_z_re",
        "worst_z_im",
        "worst_t_re",
        "worst_t_im",
        "max_modulus",
        "bounded_by_M",
        "pass",
    ]);
    let [zr, zi] = cx_cells(rep.worst_point.0);
    let [tr, ti] = cx_cells(rep.worst_point.1);
    csv.row(&[
        num(m),
        rep.checked.to_string(),
        num(rep.worst_ratio),
        zr,
        zi,
        tr,
        ti,
        num(rep.max_modulus),
        rep.bounded_by_m.to_string(),
        rep.pass.to_string(),
    ]);
    let json = json!({
        "M": m,
        "M_estimated": estimated,
        "checked": rep.checked,
        "worst_ratio": rep.worst_ratio,
        "worst_point": [cx_json(rep.worst_point.0), cx_json(rep.worst_point.1)],
        "max_modulus": rep.max_modulus,
        "bounded_by_M": rep.bounded_by_m,
        "pass": rep.pass,
    });
    Ok(Output::new(report, csv, json))
}

pub fn bridge(file: &SpecFile, ov: &Overrides, n_x: usize) -> Result<Output, CliError> {
    let b = file.initial_value();
    if b.im != 0.0 {
        return Err(CliError::Other(format!(
            "the real-line bridge needs a real b, got {b}"
        )));
    }
    let (big_r, r) = file.radii();
    let spec = extend_problem(file.order()?, b.re, &file.f_expr()?, big_r, r)?;
    let cfg = ov.solver_config(file);
    let sol = bridge_solve(&spec, &cfg, n_x)?;

    let mut report = Report::new("real-line solution");
    report
        .real("R0", sol.r0)
        .line("converged", sol.converged())
        .real("complex_residual", sol.solution.residual)
        .real("volterra_residual", sol.volterra_residual)
        .line("symmetric", sol.symmetric)
        .real("max_imag", sol.max_imag)
        .section("samples (x, u, defect)");
    let mut csv = Csv::new(&["x", "u", "defect"]);
    for ((x, u), d) in sol.xs.iter().zip(&sol.us).zip(&sol.defects) {
        report.raw(&format!("  {} {} {}\n", num(*x), num(*u), num(*d)));
        csv.row(&[num(*x), num(*u), num(*d)]);
    }
    let json = json!({
        "R0": sol.r0,
        "converged": sol.converged(),
        "complex_residual": sol.solution.residual,
        "volterra_residual": sol.volterra_residual,
        "symmetric": sol.symmetric,
        "max_imag": sol.max_imag,
        "xs": sol.xs,
        "us": sol.us,
        "defects": sol.defects,
    });
    let mut out = Output::new(report, csv, json);
    out.warnings = sol.warnings.clone();
    if !sol.converged() {
        out.exit = exit::NONCONVERGENCE;
        out.warnings
            .push("Picard iteration did not converge; reporting the best iterate".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("-1, 2").unwrap(), Complex64::new(-1.0, 2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("a").is_err());
    }

    #[test]
    fn coefficient_lists() {
        let p = parse_coeffs("0; 0; 0; 1").unwrap();
        assert_eq!(p.degree(), 3);
        let p = parse_coeffs("1,1").unwrap();
        assert_eq!(p.coeffs()[0], Complex64::new(1.0, 1.0));
    }
}
