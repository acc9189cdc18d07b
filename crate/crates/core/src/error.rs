use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("weight does not change sign on the domain")]
    NoSignChange,
    #[error("no principal eigenvalue found below the scan cap {cap:e}")]
    NoRootInRange { cap: f64 },
    #[error("Neumann problem requires a negative mean weight, got {mean}")]
    ConstraintViolated { mean: f64 },
    #[error("integrator step size underflow at {at}")]
    StepFailure { at: f64 },
    #[error("argument outside the domain of the change of variables: {0}")]
    DomainError(String),
    #[error("q = {q} does not exceed the lower bound {bound}")]
    QTooSmall { q: f64, bound: f64 },
    #[error("dimension {n} not supported here: {expected}")]
    DimensionError { n: u32, expected: &'static str },
    #[error("threshold gap has no sign change on [{lo}, {hi}]")]
    NoSignChangeInBracket { lo: f64, hi: f64 },
    #[error("inverse iteration did not converge after {iterations} iterations")]
    IterationDivergence { iterations: usize },
    #[error("no positive eigenpair with positive weighted norm")]
    NoPositiveEigenpair,
}

impl Error {
    /// Variant name, printed by the CLI on computational failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NoSignChange => "NoSignChange",
            Error::NoRootInRange { .. } => "NoRootInRange",
            Error::ConstraintViolated { .. } => "ConstraintViolated",
            Error::StepFailure { .. } => "StepFailure",
            Error::DomainError(_) => "DomainError",
            Error::QTooSmall { .. } => "QTooSmall",
            Error::DimensionError { .. } => "DimensionError",
            Error::NoSignChangeInBracket { .. } => "NoSignChangeInBracket",
            Error::IterationDivergence { .. } => "IterationDivergence",
            Error::NoPositiveEigenpair => "NoPositiveEigenpair",
        }
    }
}
