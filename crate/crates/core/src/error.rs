use thiserror::Error;

/// Errors raised by the solver, the analytic formulas and the I/O layer.
#[derive(Debug, Error)]
pub enum FloquetError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("harmonic cutoff n_max = {n_max} is below the required minimum {required}")]
    Truncation { n_max: usize, required: usize },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error(
        "mode tracking lost: overlap {overlap:.3} with the reference mode is below {threshold}"
    )]
    Tracking { overlap: f64, threshold: f64 },

    #[error("propagator unitarity defect {defect:e} exceeds {limit:e}; increase steps per period")]
    StepSize { defect: f64, limit: f64 },

    #[error("near-singular denominator {value:e} for harmonic pair (j = {j}, p = {p})")]
    NearSingular { j: i64, p: i64, value: f64 },

    #[error("perturbative regime violated: GVV radicand {radicand:e} is negative")]
    PerturbativeValidity { radicand: f64 },

    #[error("pole: {0} vanishes")]
    Pole(&'static str),

    #[error("dephasing weights do not contain the k = 0 entry")]
    MissingWeight,

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FloquetError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> FloquetError {
    FloquetError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
