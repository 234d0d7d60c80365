//! `fracdisc` command-line interface.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse error, 3 evaluation
//! singularity, 4 Picard non-convergence, 5 incompatible initial value
//! (or `z^q f` not continuous at the origin).

mod commands;
mod output;
mod specfile;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{Method, Op, OpsInput, Overrides, SchwarzInput};
use crate::output::Format;
use crate::specfile::SpecFile;

pub mod exit {
    pub const OTHER: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const SINGULARITY: i32 = 3;
    pub const NONCONVERGENCE: i32 = 4;
    pub const CONDITION: i32 = 5;
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Lib(fracdisc::Error),
    Other(String),
}

impl From<fracdisc::Error> for CliError {
    fn from(e: fracdisc::Error) -> Self {
        Self::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        use fracdisc::Error as E;
        match self {
            Self::Parse(_) => exit::PARSE,
            Self::Other(_) => exit::OTHER,
            Self::Lib(e) => match e {
                E::Syntax { .. } | E::Unbound(_) => exit::PARSE,
                E::Singularity(_) => exit::SINGULARITY,
                E::ConditionIII(_) | E::ConditionIV { .. } => exit::CONDITION,
                _ => exit::OTHER,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Parse(m) | Self::Other(m) => f.write_str(m),
            Self::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let n = a
        .trim()
        .parse()
        .map_err(|_| format!("bad grid count `{a}`"))?;
    let m = b
        .trim()
        .parse()
        .map_err(|_| format!("bad grid count `{b}`"))?;
    Ok((n, m))
}

/// Complex Riemann–Liouville calculus, existence radii and solvers for
/// fractional initial value problems on discs.
#[derive(Debug, Parser)]
#[command(name = "fracdisc", version)]
struct Cli {
    /// Output format
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "report",
        env = "FRACDISC_FORMAT"
    )]
    format: Format,
    /// Write the output to this file instead of stdout
    #[arg(long, global = true, env = "FRACDISC_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "FRACDISC_THREADS")]
    threads: Option<usize>,
    /// Gauss–Jacobi nodes per quadrature
    #[arg(long, global = true, env = "FRACDISC_N_QUAD")]
    n_quad: Option<usize>,
    /// Tolerance (solver stopping, compatibility check, or certificate margin)
    #[arg(long, global = true, env = "FRACDISC_TOL")]
    tol: Option<f64>,
    /// Maximum Picard iterations
    #[arg(long, global = true, env = "FRACDISC_MAX_ITER")]
    max_iter: Option<usize>,
    /// Sample grid as NxM (radii x angles; square for the torus scan)
    #[arg(long, global = true, env = "FRACDISC_GRID", value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply I^q or D^q to a function at given points
    Ops(OpsArgs),
    /// Estimate M and compute the existence radius R0
    Radius(SpecArgs),
    /// Check the compatibility of the initial value at the origin
    Check(SpecArgs),
    /// Solve the problem on the existence disc
    Solve(SpecArgs),
    /// Certify univalence / starlikeness for f = z^(-q) h(z)
    Classify(SpecArgs),
    /// Verify the two-variable Schwarz bound for g(z, t)
    Schwarz(SchwarzArgs),
    /// Solve a real problem on [0, R0] through its complex extension
    Bridge(BridgeArgs),
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Problem specification (TOML)
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Debug, Args)]
struct OpsArgs {
    #[arg(long, value_enum)]
    op: Op,
    #[arg(long)]
    q: f64,
    /// u as an expression in z
    #[arg(long)]
    expr: Option<String>,
    /// u as power series coefficients `a0;a1;...`, each `re` or `re,im`
    #[arg(long)]
    coeffs: Option<String>,
    /// Evaluation point `re` or `re,im` (repeatable)
    #[arg(long = "z", allow_hyphen_values = true)]
    points: Vec<String>,
    #[arg(long, value_enum)]
    method: Option<Method>,
}

#[derive(Debug, Args)]
struct SchwarzArgs {
    /// g(z, t) as an expression; may use b and q
    #[arg(long)]
    g: String,
    /// Bound M for |g| on the bidisc (estimated on the torus if omitted)
    #[arg(long)]
    m: Option<f64>,
    #[arg(long = "outer-radius", visible_alias = "R", default_value_t = 1.0)]
    outer_radius: f64,
    #[arg(long = "ball-radius", visible_alias = "r", default_value_t = 1.0)]
    ball_radius: f64,
    /// Centre b of the t-disc, `re` or `re,im`
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    b: String,
    /// Binds q in g
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Debug, Args)]
struct BridgeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Number of sample points on [0, R0]
    #[arg(long, default_value_t = 21)]
    n_x: usize,
}

fn run(cli: &Cli) -> Result<output::Output, CliError> {
    let ov = Overrides {
        n_quad: cli.n_quad,
        tol: cli.tol,
        max_iter: cli.max_iter,
        grid: cli.grid,
    };
    match &cli.command {
        Command::Ops(a) => commands::ops(
            &OpsInput {
                op: a.op,
                q: a.q,
                expr: a.expr.as_deref(),
                coeffs: a.coeffs.as_deref(),
                points: &a.points,
                method: a.method,
            },
            &ov,
        ),
        Command::Radius(a) => commands::radius(&SpecFile::load(&a.spec)?, &ov),
        Command::Check(a) => commands::check(&SpecFile::load(&a.spec)?, &ov),
        Command::Solve(a) => commands::solve_cmd(&SpecFile::load(&a.spec)?, &ov),
        Command::Classify(a) => commands::classify(&SpecFile::load(&a.spec)?, &ov),
        Command::Schwarz(a) => commands::schwarz(
            &SchwarzInput {
                g: &a.g,
                m: a.m,
                outer_radius: a.outer_radius,
                ball_radius: a.ball_radius,
                b: commands::parse_complex(&a.b)?,
                q: a.q,
            },
            &ov,
        ),
        Command::Bridge(a) => commands::bridge(&SpecFile::load(&a.spec)?, &ov, a.n_x),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Other(format!("cannot write output: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(exit::OTHER as u8);
        }
    }
    let code = match run(&cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            match emit(&cli, &out.render(cli.format)) {
                Ok(()) => out.exit,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    };
    ExitCode::from(code as u8)
}
