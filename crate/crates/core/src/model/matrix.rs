use super::linalg::{axpy, dot, LinearOperator};
use crate::error::{Error, Result};

/// Dense `L × N` sensing operator, stored column by column.
///
/// Column storage makes both products cache friendly: `Ax` accumulates the columns
/// picked by the nonzeros of `x`, and `Aᵀr` is one contiguous dot product per column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        let mut col_major = vec![0.0; data.len()];
        for i in 0..rows {
            for j in 0..cols {
                col_major[j * rows + i] = data[i * cols + j];
            }
        }
        Self::from_column_major(rows, cols, col_major)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                what: "matrix row length",
                expected: n_cols,
                found: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(n_rows, n_cols, &flat)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_column_major(n, n, data).expect("identity is well formed")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self::from_column_major(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.data.len()];
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[i * self.cols + j] = self.data[j * self.rows + i];
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_column_major(self.rows, self.cols, self.data.iter().map(|v| v * c).collect())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("apply input", self.cols, x.len())?;
        let mut out = vec![0.0; self.rows];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    pub fn adjoint(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("adjoint input", self.rows, r.len())?;
        let mut out = vec![0.0; self.cols];
        self.adjoint_into(r, &mut out);
        Ok(out)
    }

    /// `out ← Σ_k weights[k] · A[:, indices[k]]`.
    pub fn apply_columns_into(&self, indices: &[usize], weights: &[f64], out: &mut [f64]) {
        debug_assert_eq!(indices.len(), weights.len());
        out.iter_mut().for_each(|v| *v = 0.0);
        for (&j, &w) in indices.iter().zip(weights) {
            if w != 0.0 {
                axpy(w, self.column(j), out);
            }
        }
    }

    /// `out[k] ← ⟨A[:, indices[k]], r⟩`.
    pub fn adjoint_columns_into(&self, indices: &[usize], r: &[f64], out: &mut [f64]) {
        debug_assert_eq!(indices.len(), out.len());
        for (o, &j) in out.iter_mut().zip(indices) {
            *o = dot(self.column(j), r);
        }
    }

    /// Column restriction `A_S` as a borrowed operator. `indices` must be in bounds.
    pub fn restrict<'a>(&'a self, indices: &'a [usize]) -> ColumnSubset<'a> {
        assert!(
            indices.iter().all(|&j| j < self.cols),
            "column index out of bounds"
        );
        ColumnSubset {
            matrix: self,
            indices,
        }
    }
}

impl LinearOperator for DesignMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &w) in x.iter().enumerate() {
            if w != 0.0 {
                axpy(w, self.column(j), out);
            }
        }
    }

    fn adjoint_into(&self, r: &[f64], out: &mut [f64]) {
        debug_assert_eq!(r.len(), self.rows);
        for (j, o) in out.iter_mut().enumerate() {
            *o = dot(self.column(j), r);
        }
    }
}

/// The columns of a [`DesignMatrix`] listed in `indices`, in that order.
#[derive(Debug, Clone, Copy)]
pub struct ColumnSubset<'a> {
    matrix: &'a DesignMatrix,
    indices: &'a [usize],
}

impl ColumnSubset<'_> {
    pub fn indices(&self) -> &[usize] {
        self.indices
    }
}

impl LinearOperator for ColumnSubset<'_> {
    fn rows(&self) -> usize {
        self.matrix.rows
    }

    fn cols(&self) -> usize {
        self.indices.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.apply_columns_into(self.indices, x, out);
    }

    fn adjoint_into(&self, r: &[f64], out: &mut [f64]) {
        self.matrix.adjoint_columns_into(self.indices, r, out);
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
