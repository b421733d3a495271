use thiserror::Error;

/// Errors produced by the numerical kernel and the builders on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian: ‖A − A†‖_F = {defect:.3e} > {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("operator is not unitary: ‖U†U − I‖_F = {defect:.3e} > {tolerance:.3e}")]
    NotUnitary { defect: f64, tolerance: f64 },

    #[error("state vector has zero or non-finite norm")]
    ZeroState,

    #[error("state vector is not normalized: ‖ψ‖ = {norm}")]
    NotNormalized { norm: f64 },

    #[error("matrix decomposition failed: {0}")]
    Decomposition(String),

    #[error("invalid spin {0}: expected a positive half-integer with 2s+1 ≤ 64")]
    InvalidSpin(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension budget exceeded: {required} > {budget}")]
    DimensionBudget { required: usize, budget: usize },

    #[error("interior buffer {buffer} must be smaller than the truncation {levels}")]
    InvalidBuffer { buffer: usize, levels: usize },

    #[error("generator `{0}` is not present in this representation")]
    MissingGenerator(String),

    #[error("operation requires a representation free of external potentials")]
    NotFree,

    #[error("{0}")]
    Unsupported(String),

    #[error("reports come from different representation kinds: {0} vs {1}")]
    MismatchedReports(String, String),

    #[error("time grid too short: {0} points, need at least 3")]
    GridTooShort(usize),

    #[error("unstable step: {0}")]
    UnstableStep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
