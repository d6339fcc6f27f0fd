use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {arg} = {value} is outside the domain: {expected}")]
    Domain {
        arg: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("no root found for {equation} after bracket expansion")]
    NoRoot { equation: &'static str },

    #[error("fiber enumeration exceeded the cap of {cap} (n_star would be {n_star})")]
    FiberCap { cap: usize, n_star: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("hypotheses not satisfied: {}", .failed.join(", "))]
    Hypothesis { failed: Vec<&'static str> },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("factorization of A - ({shift})M failed at pivot {pivot}; shift is not below the spectrum")]
    Factorization { shift: f64, pivot: usize },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("quadrature self-estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(arg: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            arg,
            value,
            expected: "finite and > 0",
        })
    }
}

pub(crate) fn require_negative(arg: &'static str, value: f64) -> Result<()> {
    if value < 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            arg,
            value,
            expected: "finite and < 0",
        })
    }
}
