use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("insufficient samples: n = {n}, need at least {min}")]
    InsufficientSamples { n: usize, min: usize },

    #[error("matrix is not symmetric: relative asymmetry {asym:.3e} exceeds tolerance")]
    NotSymmetric { asym: f64 },

    #[error("eigen decomposition failed: {0}")]
    EigenFailure(String),

    #[error("spike {index} is not detectable: |lambda| = {lambda:.6} <= sqrt(J) = {threshold:.6}")]
    UndetectableSpike {
        index: i64,
        lambda: f64,
        threshold: f64,
    },

    #[error("eigenvalue tie at index {index}: spectrum is degenerate")]
    DegenerateSpectrum { index: usize },

    #[error(
        "debiased class separation is not positive (|mu|^2/sigma^2 - J0 - J1 = {value:.6}); \
         the classes are too close to separate at this p/n"
    )]
    InfeasibleAlpha { value: f64 },

    #[error("pooled covariance is singular (p = {p} >= n - 1 = {limit}); use rlda or srlda")]
    SingularCovariance { p: usize, limit: usize },

    #[error("parameters outside the admissible set: {0}")]
    Inadmissible(String),

    #[error("empty admissible grid: no evaluable (omega1, omega2) points")]
    EmptyGrid,

    #[error("infeasible surface: {0}")]
    InfeasibleSurface(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model file version {found} is not supported (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error("model deserialization failed: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
