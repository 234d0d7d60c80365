use std::path::Path;

use fracdisc::existence::ProblemSpec;
use fracdisc::expr::{parse, Expr};
use fracdisc::geometry::DiscGrid;
use fracdisc::solver::SolverConfig;
use fracdisc::{Complex64, FracOrder};
use serde::Deserialize;

use crate::CliError;

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn get(self) -> Complex64 {
        match self {
            Self::Real(re) => Complex64::new(re, 0.0),
            Self::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub degree: Option<usize>,
    pub n_theta: Option<usize>,
    pub n_rad: Option<usize>,
    pub n_quad: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub damping: Option<f64>,
    pub condition_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    /// Angles per factor of the torus scan for `M`.
    pub torus: Option<usize>,
    /// `[radii, angles]` of the unit-disc grid used by `classify`.
    pub disc: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub q: f64,
    #[serde(default)]
    pub b: Option<ComplexValue>,
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub h: Option<String>,
    #[serde(rename = "R", default)]
    pub outer_radius: Option<f64>,
    #[serde(rename = "r", default)]
    pub ball_radius: Option<f64>,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default)]
    pub grids: GridOverrides,
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Other(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(format!("spec file: {e}")))
    }

    pub fn order(&self) -> Result<FracOrder, CliError> {
        Ok(FracOrder::new(self.q)?)
    }

    pub fn initial_value(&self) -> Complex64 {
        self.b.map_or(Complex64::new(0.0, 0.0), ComplexValue::get)
    }

    pub fn radii(&self) -> (f64, f64) {
        (
            self.outer_radius.unwrap_or(1.0),
            self.ball_radius.unwrap_or(1.0),
        )
    }

    pub fn f_expr(&self) -> Result<Expr, CliError> {
        let text = self
            .f
            .as_deref()
            .ok_or_else(|| CliError::Other("spec file has no `f`".into()))?;
        Ok(parse(text)?)
    }

    pub fn problem(&self) -> Result<ProblemSpec, CliError> {
        let (big_r, r) = self.radii();
        Ok(ProblemSpec::new(
            self.order()?,
            self.initial_value(),
            self.f_expr()?,
            big_r,
            r,
        )?)
    }

    /// `h` given directly, or recovered as `z^q f` from an `f` free of `t`.
    pub fn h_expr(&self) -> Result<Expr, CliError> {
        if let Some(h) = &self.h {
            return Ok(parse(h)?.bind_q(self.q));
        }
        let f = self.f_expr()?;
        if f.mentions_var(fracdisc::expr::Var::T) {
            return Err(CliError::Other(
                "classify needs f of the form z^(-q)*h(z), without t".into(),
            ));
        }
        Ok(f.bind_q(self.q).times_z_power(self.q))
    }

    pub fn solver_config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        let s = &self.solver;
        SolverConfig {
            degree: s.degree.unwrap_or(d.degree),
            n_theta: s.n_theta.unwrap_or(d.n_theta),
            n_rad: s.n_rad.unwrap_or(d.n_rad),
            n_quad: s.n_quad.unwrap_or(d.n_quad),
            tol: s.tol.unwrap_or(d.tol),
            max_iter: s.max_iter.unwrap_or(d.max_iter),
            damping: s.damping.unwrap_or(d.damping),
            torus_grid: self.grids.torus.unwrap_or(d.torus_grid),
            condition_tol: s.condition_tol.unwrap_or(d.condition_tol),
        }
    }

    pub fn disc_grid(&self) -> DiscGrid {
        match self.grids.disc {
            Some([radii, angles]) => DiscGrid::new(radii, angles),
            None => DiscGrid::default(),
        }
    }
}
