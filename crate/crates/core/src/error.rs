use thiserror::Error;

/// Errors produced by the finite element library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate simplex {what}: |det| = {det:.3e}")]
    Degenerate { what: String, det: f64 },

    #[error("duplicate cell {0:?} in cell list")]
    DuplicateCell(Vec<usize>),

    #[error("mesh of {requested} cells exceeds the cell budget of {budget}")]
    CellBudget { requested: u128, budget: usize },

    #[error("polynomial term count {terms} exceeds the guard of {limit}")]
    TermBlowup { terms: usize, limit: usize },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    Degree { degree: usize, max: usize },

    #[error("unisolvence failure: DOF matrix has sigma_min/sigma_max = {ratio:.3e}")]
    Unisolvence { ratio: f64 },

    #[error("singular {what}: {detail}")]
    Singular { what: String, detail: String },

    #[error("eigen solve failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, FemError>;
