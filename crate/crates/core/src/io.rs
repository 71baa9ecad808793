//! JSON documents for matrices and pairs. Entries are strings so rationals
//! survive exactly; emitted entries are canonical, so documents round-trip.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::matrix::Matrix;

pub type Grid = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDescriptor>,
    pub matrix: Grid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDescriptor>,
    pub m: Grid,
    pub n: Grid,
    /// Normal-form `B` the pair was generated from, when it is the unique one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth_b: Option<Grid>,
}

pub fn to_grid(m: &Matrix) -> Grid {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// Parses a grid; an empty grid is the `0 x 0` matrix.
pub fn from_grid(field: FieldDescriptor, grid: &Grid) -> Result<Matrix> {
    let rows = grid
        .iter()
        .map(|r| r.iter().map(|e| field.parse_scalar(e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(field, 0, 0));
    }
    Matrix::from_rows(field, rows).map_err(|e| Error::Parse(e.to_string()))
}

impl MatrixDocument {
    pub fn new(m: &Matrix) -> Self {
        MatrixDocument { field: Some(m.field()), matrix: to_grid(m) }
    }

    /// The document's field wins over `default`.
    pub fn to_matrix(&self, default: FieldDescriptor) -> Result<Matrix> {
        from_grid(self.field.unwrap_or(default), &self.matrix)
    }
}

impl PairDocument {
    pub fn new(m: &Matrix, n: &Matrix) -> Self {
        PairDocument { field: Some(m.field()), m: to_grid(m), n: to_grid(n), ground_truth_b: None }
    }

    pub fn to_matrices(&self, default: FieldDescriptor) -> Result<(Matrix, Matrix)> {
        let f = self.field.unwrap_or(default);
        Ok((from_grid(f, &self.m)?, from_grid(f, &self.n)?))
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("documents serialize")
}
