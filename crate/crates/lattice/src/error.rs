use inhomkg_core::AlgebraError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape { expected: (usize, usize, usize), found: (usize, usize, usize) },
    #[error("invalid lattice parameter: {0}")]
    Parameter(String),
    #[error("metric is not Lorentzian at row {t}, site {x}")]
    NotLorentzian { t: usize, x: usize },
    #[error("off-diagonal metric at row {t}, site {x} is not representable by the explicit scheme")]
    MixedMetric { t: usize, x: usize },
    #[error("causal-speed bound violated at row {t}, site {x} (Courant number {value})")]
    Causality { t: usize, x: usize, value: f64 },
    #[error("support reaches the temporal margin at row {row}")]
    Support { row: usize },
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("field is not a solution: relative residual {0:e}")]
    NotSolution(f64),
    #[error("class belongs to a different spacetime")]
    LatticeMismatch,
    #[error("infeasible {what}: residual {residual:e}")]
    Infeasible { what: String, residual: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, LatticeError>;
