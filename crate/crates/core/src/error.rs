use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("element {index} is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { index: usize, min_eigenvalue: f64 },

    #[error("elements do not sum to the identity (max-entry residual {0:e})")]
    IncompletenessResidual(f64),

    #[error("entry is not finite: {0}")]
    NonFinite(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("column {0} is not a probability distribution")]
    InvalidDistribution(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("entropy argument has eigenvalue {0:e} below zero")]
    NegativeSpectrum(f64),

    #[error("linear program stalled after {iterations} pivots")]
    SolverStall { iterations: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("POVM normalizer is singular after {retries} redraws")]
    SingularNormalizer { retries: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported format version {0:?}")]
    UnsupportedVersion(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable kind used by the command-line error prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonHermitian { .. } => "non_hermitian",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::NotPsd { .. } => "validation",
            Error::IncompletenessResidual(_) => "validation",
            Error::NonFinite(_) => "validation",
            Error::Empty(_) => "validation",
            Error::InvalidDistribution(_) => "validation",
            Error::InvalidState(_) => "invalid_state",
            Error::InvalidEnsemble(_) => "invalid_ensemble",
            Error::NegativeSpectrum(_) => "negative_spectrum",
            Error::SolverStall { .. } => "solver_stall",
            Error::PreconditionViolated(_) => "precondition",
            Error::SingularNormalizer { .. } => "singular_normalizer",
            Error::Parse(_) => "parse",
            Error::UnsupportedVersion(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
