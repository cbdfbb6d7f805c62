use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid index {index} out of range (grid has {points} points)")]
    IndexOutOfRange { index: usize, points: usize },

    #[error("invalid exponent {value}: must lie in {range}")]
    InvalidExponent { value: f64, range: &'static str },

    #[error("triple ({0}, {1}, {2}) is not strictly increasing")]
    NonMonotoneTriple(usize, usize, usize),

    #[error("pair ({0}, {1}) is not ordered")]
    UnorderedPair(usize, usize),

    #[error("objects live on different grids")]
    GridMismatch,

    #[error("Hölder exponents differ ({0} vs {1})")]
    ExponentMismatch(f64, f64),

    #[error("controlled path and driver do not share the same base rough path")]
    BaseMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("tensor is not symmetric (defect {0:e})")]
    NotSymmetric(f64),

    #[error("non-finite value encountered: {0}")]
    NonFiniteOutput(String),

    #[error("derivative of order {requested} unavailable (declared order {declared})")]
    OrderUnavailable { requested: usize, declared: usize },

    #[error("bound precondition violated: {0}")]
    BoundPreconditionViolated(String),

    #[error("step size fell below tau_min on segment starting at t = {t_start} (tau = {tau:e})")]
    StepTooSmall { t_start: f64, tau: f64 },

    #[error("Picard iteration did not converge in {0} iterations")]
    MaxItersExceeded(usize),

    #[error("solver failed on segment {segment} starting at t = {t_start}: {source}")]
    Segment {
        segment: usize,
        t_start: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid Hurst index {0}: must lie in (1/3, 1/2]")]
    InvalidHurst(f64),

    #[error("circulant embedding failed: {0}")]
    EmbeddingFailure(String),

    #[error("unknown curve '{0}'")]
    UnknownCurve(String),

    #[error("unknown field '{0}'")]
    UnknownField(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical procedure itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StepTooSmall { .. }
            | Error::NonFiniteOutput(_)
            | Error::MaxItersExceeded(_)
            | Error::EmbeddingFailure(_) => true,
            Error::Segment { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) const ROUGH_RANGE: &str = "(1/3, 1/2]";

pub(crate) fn check_rough_exponent(alpha: f64) -> Result<()> {
    if alpha > 1.0 / 3.0 && alpha <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidExponent { value: alpha, range: ROUGH_RANGE })
    }
}
