use thiserror::Error;

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("site count mismatch: {left} vs {right}")]
    SiteCountMismatch { left: usize, right: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("{kind} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("degenerate torus {lx}x{ly}: both extents must be at least 2")]
    DegenerateLattice { lx: usize, ly: usize },

    #[error("site layout needs {bits} bits, more than the 128 available")]
    LayoutTooWide { bits: u32 },

    #[error("model validation failed: {0}")]
    Validation(String),

    #[error("operator is not real: {0}")]
    NotReal(String),

    #[error("state budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },

    #[error("label {label:?} maps to two different configurations")]
    InconsistentLabel { label: Vec<u16> },

    #[error("term {term} maps basis state {state} outside the subspace")]
    OutOfBasis { term: usize, state: usize },

    #[error("non-diagonal residual: {0}")]
    NonDiagonalResidual(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("requested {k} eigenpairs of a {dim}-dimensional operator")]
    TooManyEigenpairs { k: usize, dim: usize },

    #[error("all {0} returned levels are degenerate; gap undefined")]
    GapUndefined(usize),

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("config error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, GadgetError>;
