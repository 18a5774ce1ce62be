use alloc::string::String;

use crate::dataset::Domain;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: shape mismatch between {left_rows}x{left_cols} and {right_rows}x{right_cols}")]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix data has {actual} values, expected {expected} for {rows}x{cols}")]
    DataLength {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("{0}: input is empty")]
    Empty(&'static str),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: entries ({row},{col}) differ by {delta:e}")]
    NotSymmetric { row: usize, col: usize, delta: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{op} needs at least {needed} rows, got {got}")]
    TooFewRows {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("PCA target dimension {target} exceeds min(rows, cols) = {max}")]
    TargetDimTooLarge { target: usize, max: usize },

    #[error("DIS requires both domains (no {0} rows present)")]
    MissingDomain(Domain),

    #[error("row counts disagree: embeddings {embeddings}, domains {domains}, actions {actions}")]
    RowCountMismatch {
        embeddings: usize,
        domains: usize,
        actions: usize,
    },

    #[error("embedding dimension mismatch for {encoder_id}: expected {expected}, found {actual}")]
    DimMismatch {
        encoder_id: String,
        expected: usize,
        actual: usize,
    },

    #[error("row index {index} out of range for {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },

    #[error("validation split is empty")]
    EmptyValidation,

    #[error("probe training diverged at epoch {epoch} (train MSE not finite); try a learning rate below {learning_rate}")]
    ProbeDiverged { epoch: usize, learning_rate: f64 },

    #[error("duplicate encoder id {0:?}")]
    DuplicateEncoder(String),
}
