use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unbound variable `{0}`")]
    Unbound(String),

    #[error("quadrature rule construction failed: {0}")]
    Quadrature(String),

    #[error("condition (iii) violated: {0}")]
    ConditionIII(String),

    #[error(
        "condition (iv) violated: z^q f(z, b) -> ({}, {}) at z = 0, expected b/Γ(1-q) = ({}, {})",
        observed.re, observed.im, target.re, target.im
    )]
    ConditionIV {
        observed: Complex64,
        target: Complex64,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
