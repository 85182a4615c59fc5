use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("harmonic {harmonic} outside the representable range -{n_modes}..{n_modes}")]
    HarmonicOutOfRange { harmonic: i64, n_modes: usize },

    #[error("grid mismatch: expected {expected} samples, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration failed at lambda = {lambda}: {reason}")]
    Integration { lambda: Complex64, reason: String },

    #[error("singular conjugation matrix at lambda = {0} (requires lambda != 0)")]
    SingularConjugation(Complex64),

    #[error("potential class {found} not accepted here (requires {required})")]
    PotentialClass {
        found: &'static str,
        required: &'static str,
    },

    #[error("root bracketing failed for cluster {n} in window [{lo}, {hi}]: {reason}")]
    Bracketing {
        n: i64,
        lo: f64,
        hi: f64,
        reason: String,
    },

    #[error("gaps {n} and {m} overlap; potential lies outside the isolating regime")]
    OverlappingGaps { n: i64, m: i64 },

    #[error("branch tracking failed near lambda = {lambda}: {reason}")]
    Branch { lambda: Complex64, reason: String },

    #[error("lambda = {0} lies on a spectral gap")]
    OnGap(Complex64),

    #[error("ill-conditioned least-squares fit (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("state shape does not match {0}")]
    ShapeMismatch(String),

    #[error("precondition violated for {identity}: {reason}")]
    Precondition { identity: String, reason: String },

    #[error("flow blew up at t = {t}: norm {norm:.3e}")]
    BlowUp { t: f64, norm: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}
