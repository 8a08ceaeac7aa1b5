use thiserror::Error;

use crate::groups::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid tensor space: {0}")]
    InvalidSpace(String),

    #[error("dense materialization of {requested} complex entries exceeds the budget of {budget}")]
    ResourceLimit { requested: usize, budget: usize },

    #[error("algebra span has an empty basis")]
    EmptySpan,

    #[error("basis of span `{0}` is linearly dependent")]
    DependentBasis(String),

    #[error("invalid Cayley table: {0}")]
    InvalidGroup(Violation),

    #[error("group construction refused: {0}")]
    GroupTooLarge(String),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("operator is not in the ambient algebra `{span}` (residual {residual:.3e})")]
    NotInAmbient { span: String, residual: f64 },

    #[error("wrong realization kind: expected {expected}, found {found}")]
    WrongKind { expected: String, found: String },

    #[error("no closed form is available for {0}")]
    Unsupported(String),

    #[error("support contains ({0}, {1}), which is off the anti-diagonal")]
    SupportOffAntiDiagonal(usize, usize),

    #[error("invalid tolerance {0}; expected a finite positive value")]
    InvalidTolerance(f64),

    #[error("symbol has no terms")]
    EmptySymbol,

    #[error("realization failed certification: {0}")]
    Certification(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
