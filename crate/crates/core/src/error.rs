use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("total spreading: sigma{index} = {value} is not positive")]
    TotalSpreading { index: usize, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("{what} did not converge: {iterations} iterations, relative residual {residual:e}")]
    LinearSolveFailure {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("pressure Poisson solve did not converge: {iterations} iterations, relative residual {residual:e}")]
    PoissonSolveFailure { iterations: usize, residual: f64 },

    #[error("time step {dt:e} exceeds the {bound} stability limit {limit:e}")]
    CflViolation {
        dt: f64,
        limit: f64,
        bound: &'static str,
    },

    #[error("element {element} inverted: det F = {jacobian:e}")]
    Inverted { element: usize, jacobian: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("contour not found: {0}")]
    ContourNotFound(String),

    #[error("invariant breached at t = {time}: {message}")]
    InvariantBreach { time: f64, message: String },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Stable reason code printed by the CLI on failure.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TotalSpreading { .. } => "TotalSpreading",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::LinearSolveFailure { .. } => "LinearSolveFailure",
            Error::PoissonSolveFailure { .. } => "PoissonSolveFailure",
            Error::CflViolation { .. } => "CflViolation",
            Error::Inverted { .. } => "Inverted",
            Error::Parse { .. } => "ParseError",
            Error::UnknownKey { .. } => "UnknownKey",
            Error::ContourNotFound(_) => "ContourNotFound",
            Error::InvariantBreach { .. } => "InvariantBreach",
            Error::Io(_) => "IoFailure",
        }
    }
}
