use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("expected a {expected}D field, got {found}D")]
    WrongDimension { expected: usize, found: usize },

    #[error("invalid exponent p = {0}: Lebesgue exponents must satisfy p >= 1")]
    InvalidExponent(f64),

    #[error("homogeneous norm undefined: field mean {mean:e} does not vanish (s = {s})")]
    NonzeroMean { mean: f64, s: f64 },

    #[error("circulation obstruction on torus: vorticity mean {mean:e} does not vanish")]
    CirculationObstruction { mean: f64 },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("t0 too large for A0 = {a0:.6e}: successive-difference ratio >= 1 for 3 consecutive iterations (last ratio {ratio:.4}); reduce t0 toward C/A0^2")]
    NonContraction { a0: f64, ratio: f64 },

    #[error("numerical divergence: {0}")]
    Divergence(String),

    #[error("step-size restriction could not be met: {0}")]
    Instability(String),

    #[error("inadmissible exponents: {}", .0.join("; "))]
    Inadmissible(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed field file: {0}")]
    Format(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
