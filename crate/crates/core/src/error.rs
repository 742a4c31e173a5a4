use std::path::PathBuf;

use thiserror::Error;

use crate::solver::Side;

pub type Result<T, E = GapError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GapError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-Hermitian block {block}: max asymmetry {asymmetry:e} exceeds tolerance")]
    NonHermitian { block: &'static str, asymmetry: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("level index k={k} out of range 1..={max}")]
    IndexOutOfRange { k: usize, max: usize },

    #[error("invalid relativistic quantum number: {0}")]
    InvalidQuantumNumber(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("brute-force oracle limited to dim <= {cap}, got {dim}")]
    OracleTooLarge { dim: usize, cap: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error(
        "root-find for {side} level k={k} did not converge after {iterations} iterations; \
         final bracket [{lo:.17e}, {hi:.17e}]"
    )]
    NonConvergence {
        side: Side,
        k: usize,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("at tau={tau}: {source}")]
    AtTau {
        tau: f64,
        #[source]
        source: Box<GapError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl GapError {
    /// True for failures of the numerical kernels rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            GapError::NonConvergence { .. }
            | GapError::Eigen(_)
            | GapError::InvariantViolation(_) => true,
            GapError::AtTau { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
