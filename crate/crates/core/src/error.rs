use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate point at coordinate {0}")]
    DuplicatePoint(f64),
    #[error("non-finite coordinate {0}")]
    NonFinite(f64),
    #[error("empty window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("cardinality mismatch: {left} vs {right} points")]
    CardinalityMismatch { left: usize, right: usize },
    #[error("inner window [{inner_lo}, {inner_hi}] is not contained in outer window [{outer_lo}, {outer_hi}]")]
    WindowNesting {
        inner_lo: f64,
        inner_hi: f64,
        outer_lo: f64,
        outer_hi: f64,
    },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("singular overlap at coordinate {0}")]
    SingularOverlap(f64),
    #[error("exterior point {0} lies inside the resampling window")]
    ExteriorOverlap(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("tensor quadrature limited to n <= 3, got n = {0}")]
    TooLarge(usize),
    #[error("every sampled Gibbs weight vanished")]
    DegenerateWeight,
    #[error("{count} tuples in one sample exceeds the cap of {cap}")]
    CombinatorialBlowup { count: u128, cap: u128 },
    #[error("test function support [{lo}, {hi}] leaves the sampled domain")]
    SupportOverflow { lo: f64, hi: f64 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
