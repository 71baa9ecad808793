use thiserror::Error;

use crate::field::FieldDescriptor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldDescriptor, FieldDescriptor),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("repeated eigenvalue {0}")]
    RepeatedEigenvalue(String),

    #[error("{0} is not nilpotent")]
    NotNilpotent(&'static str),

    #[error("matrices do not commute")]
    NotCommuting,

    #[error("common kernel dimension {0}")]
    CommonKernelDimension(usize),

    /// A superdiagonal entry of the leading diagonal superblock vanished after
    /// Jordanizing its diagonal blocks. Impossible when the common kernel is
    /// one-dimensional.
    #[error("superdiagonal entry b[{0},{1}] vanished")]
    VanishingSuperdiagonal(usize, usize),

    #[error("internal assertion failed: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Precondition violations on caller-supplied matrices.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotSquare { .. }
                | Error::DimensionMismatch(_)
                | Error::FieldMismatch(..)
                | Error::NotNilpotent(_)
                | Error::NotCommuting
                | Error::CommonKernelDimension(_)
        )
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::VanishingSuperdiagonal(..) | Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
