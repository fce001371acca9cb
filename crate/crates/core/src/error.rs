use thiserror::Error;

use crate::measures::MeasureKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |m[i,j] - conj(m[j,i])| = {0:e})")]
    NotHermitian(f64),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid subsystem shape: {0}")]
    InvalidShape(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("normalization: {0}")]
    Normalization(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("{0} is defined for pure states only; valid measures for mixed states: negativity")]
    RequiresPureState(MeasureKind),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}
