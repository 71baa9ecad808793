//! Dense exact matrices and elimination kernels.
//!
//! Everything here is tolerance-free: equality is structural equality of
//! reduced fractions or canonical residues. Elimination always pivots on the
//! first nonzero entry in column order, so kernels and witnesses are
//! reproducible.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};

/// Column vector.
pub type Vector = Vec<Scalar>;

/// Row-major dense matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: FieldDescriptor, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldDescriptor, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// The nilpotent Jordan block `J_n(0)`: ones on the first superdiagonal.
    pub fn jordan_block(field: FieldDescriptor, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 1..n {
            m.set(i - 1, i, field.one());
        }
        m
    }

    pub fn diagonal(field: FieldDescriptor, diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(field, n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn from_rows(field: FieldDescriptor, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for s in row {
                if s.field() != field {
                    return Err(Error::FieldMismatch(s.field(), field));
                }
                data.push(s);
            }
        }
        Ok(Matrix { field, rows: nrows, cols: ncols, data })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(field: FieldDescriptor, rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect();
        Self::from_rows(field, rows).expect("rectangular integer rows")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: FieldDescriptor, n: usize, columns: &[Vector]) -> Self {
        let mut m = Self::zeros(field, n, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "column length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert_eq!(v.field(), self.field);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field, self.rows)
    }

    /// Positions of nonzero entries, row-major.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "submatrix out of range");
        let mut m = Self::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(row0 + i, col0 + j).clone());
            }
        }
        m
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, block: &Matrix) {
        assert!(row0 + block.rows <= self.rows && col0 + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row0 + i, col0 + j, block.get(i, j).clone());
            }
        }
    }

    /// `[self; other]`
    pub fn vstack(&self, other: &Matrix) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!("vstack {} vs {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Block diagonal sum.
    pub fn direct_sum(field: FieldDescriptor, blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(field, n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    /// Exact product. Zero entries of `self` are skipped, which matters for
    /// the sparse structured matrices this crate mostly multiplies.
    pub fn mat_mul(&self, other: &Matrix) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut acc = Self::identity(self.field, self.rows);
        for _ in 0..e {
            acc = acc.mat_mul(self)?;
        }
        Ok(acc)
    }

    /// `M^n == 0` for an `n x n` matrix.
    pub fn is_nilpotent(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let mut p = Self::identity(self.field, self.rows);
        for _ in 0..self.rows {
            if p.is_zero() {
                return true;
            }
            p = p.mat_mul(self).expect("square");
        }
        p.is_zero()
    }

    /// `self * other == other * self`.
    pub fn commutes_with(&self, other: &Matrix) -> Result<bool> {
        Ok(self.mat_mul(other)? == other.mat_mul(self)?)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // the reduced form is unique, so pick the cheapest pivot
            let Some(p) = (row..m.rows).filter(|&r| !m.get(r, col).is_zero()).min_by_key(|&r| m.get(r, col).size_hint())
            else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inverse().expect("nonzero pivot");
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let pv = m.get(row, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(r, j) - &(&factor * pv);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column of the
    /// echelon form (in column order). Empty iff `self` is injective.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Self::identity(self.field, n));
        let (r, pivots) = aug.rref();
        if (0..n).any(|i| pivots.get(i) != Some(&i)) {
            return Err(Error::Singular);
        }
        Ok(r.submatrix(0, n, n, n))
    }

    /// `s^-1 * self * s`.
    pub fn conjugate(&self, s: &Matrix) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if s.rows != self.rows || !s.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "conjugating {}x{} by {}x{}",
                self.rows, self.cols, s.rows, s.cols
            )));
        }
        s.invert()?.mat_mul(self)?.mat_mul(s)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    /// Panics on shape or field mismatch; use [`Matrix::mat_mul`] for a
    /// fallible product.
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.mat_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|s| s.to_string()).collect();
        let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(1);
        for i in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|j| format!("{:>width$}", cells[i * self.cols + j])).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Free function form of [`Matrix::mat_mul`].
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.mat_mul(b)
}

pub fn rank(a: &Matrix) -> usize {
    a.rank()
}

pub fn kernel_basis(a: &Matrix) -> Vec<Vector> {
    a.kernel_basis()
}

pub fn invert(a: &Matrix) -> Result<Matrix> {
    a.invert()
}

pub fn conjugate(m: &Matrix, s: &Matrix) -> Result<Matrix> {
    m.conjugate(s)
}

/// Incrementally maintained echelon basis of a span of vectors.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    field: FieldDescriptor,
    dim: usize,
    // (pivot index, row normalized so the pivot is one)
    rows: Vec<(usize, Vector)>,
}

impl SpanBuilder {
    pub fn new(field: FieldDescriptor, dim: usize) -> Self {
        SpanBuilder { field, dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            let c = v[*p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&c * r);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inverse().expect("nonzero");
        for x in r.iter_mut() {
            *x = &*x * &inv;
        }
        // keep earlier rows reduced against the new pivot
        for (_, row) in self.rows.iter_mut() {
            let c = row[p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, nr) in row.iter_mut().zip(&r) {
                if !nr.is_zero() {
                    *x = &*x - &(&c * nr);
                }
            }
        }
        self.rows.push((p, r));
        true
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }
}
