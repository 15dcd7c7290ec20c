use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    QuadratureDiverged {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("matrix-element oracle did not reach tolerance {tol:e} (estimate {estimate:e}, error {error:e})")]
    OracleNotConverged { estimate: f64, error: f64, tol: f64 },

    #[error("level truncation N_max = {n_max} leaves tail {tail:e} above bound {bound:e}")]
    TruncationTail { n_max: usize, tail: f64, bound: f64 },

    #[error("model dimension {dim} exceeds limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("eigensolver did not converge (residual {residual:e} after {iterations} iterations)")]
    EigenNotConverged { residual: f64, iterations: usize },

    #[error("degenerate energy denominator {gap:e} between state {reference} and state {other}")]
    DegenerateDenominator {
        reference: String,
        other: String,
        gap: f64,
    },

    #[error("cutoff scan needs at least {needed} cutoffs, got {got}")]
    TooFewCutoffs { needed: usize, got: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}
