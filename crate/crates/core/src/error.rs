use std::path::PathBuf;

use thiserror::Error;

use crate::integrals::IntegralResult;

pub type Result<T> = std::result::Result<T, WaterbedError>;

#[derive(Debug, Error)]
pub enum WaterbedError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial is a nonzero constant and has no roots")]
    DegreeZero,

    #[error("eigenvalue iteration did not converge for companion matrix of degree {0}")]
    EigenFailure(usize),

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("system is improper: numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },

    #[error("closed loop is degenerate: D(z) + N(z) is identically zero")]
    DegenerateLoop,

    #[error("frequency response evaluated at a pole on the unit circle (omega = {omega})")]
    PoleOnCircle { omega: f64 },

    #[error("no nonzero Markov parameter found within {0} steps")]
    AllMarkovZero(usize),

    #[error("closed loop is unstable: pole at {re} + {im}j has modulus {modulus}")]
    UnstableClosedLoop { re: f64, im: f64, modulus: f64 },

    #[error("loop gain is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("entry ({row}, {col}) is improper")]
    ImproperEntry { row: usize, col: usize },

    #[error("closed-loop characteristic polynomial det(D + N) is identically zero")]
    DegenerateClosedLoop,

    #[error("system is singular: det N(z) is identically zero")]
    SingularSystem,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("quadrature did not converge: error estimate {} after {} subdivisions", .partial.error_estimate, .partial.subdivisions_used)]
    NonConvergent { partial: IntegralResult },

    #[error("integrand evaluation failed at omega = {omega}: {reason}")]
    EvaluationFailure { omega: f64, reason: String },

    #[error("root {re} + {im}j is not outside the unit circle")]
    NotOutside { re: f64, im: f64 },

    #[error("gain is zero")]
    ZeroGain,

    #[error("beta0 is not a zero of the loop gain: |S(beta0) - 1| = {residual}")]
    BadZero { residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
