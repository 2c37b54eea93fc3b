use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("scalar modes differ (exact vs floating)")]
    ModeMismatch,
    #[error("scalar type does not match the declared scalar mode")]
    ModeTypeMismatch,
    #[error("form is not antisymmetric at entry ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("distinguished point is the zero vector")]
    ZeroPoint,
    #[error("distinguished point is not in the null space of the form")]
    PointNotNull,
    #[error("affine point does not take the value 1 on the distinguished vector")]
    InvalidPoint,
    #[error("operation requires a pointed space")]
    NotPointed,
    #[error("space is not a recorded direct sum")]
    NotDirectSum,
    #[error("linear functional does not vanish on the distinguished vector")]
    FunctionalNotNull,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("polynomial lives on {found} generators but the space has {expected}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("malformed document: {0}")]
    Document(String),
    #[error("{0}")]
    Structure(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
