//! Row-sparse matrices with a fixed number of nonzeros per row.
//!
//! Reservoir weights are sampled with exactly `C` nonzero entries in every
//! row, so the natural storage is a dense `rows x C` table of column indices
//! plus a parallel table of values. Products against dense matrices then
//! cost `O(rows * C * n)` regardless of the nominal width.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Sparse matrix in fixed-width row form: every row holds exactly
/// `nnz_per_row` entries at strictly increasing column positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRowMatrix {
    rows: usize,
    cols: usize,
    nnz_per_row: usize,
    /// `rows * nnz_per_row` column indices, row-major, sorted within a row.
    col_indices: Vec<usize>,
    /// Values parallel to `col_indices`.
    values: Vec<f64>,
}

impl SparseRowMatrix {
    /// Builds a matrix from per-row entry lists.
    ///
    /// Every row must contain exactly `nnz_per_row` entries with distinct,
    /// in-range column indices; entries may be given in any order and are
    /// stored sorted by column.
    pub fn from_rows(
        rows: usize,
        cols: usize,
        nnz_per_row: usize,
        row_entries: &[Vec<(usize, f64)>],
    ) -> Result<Self> {
        if row_entries.len() != rows {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows} rows of entries, got {}",
                row_entries.len()
            )));
        }
        if nnz_per_row > cols {
            return Err(Error::InvalidConfig(format!(
                "{nnz_per_row} nonzeros per row do not fit in {cols} columns"
            )));
        }
        let mut col_indices = Vec::with_capacity(rows * nnz_per_row);
        let mut values = Vec::with_capacity(rows * nnz_per_row);
        for (r, entries) in row_entries.iter().enumerate() {
            if entries.len() != nnz_per_row {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {nnz_per_row}",
                    entries.len()
                )));
            }
            let mut sorted = entries.clone();
            sorted.sort_by_key(|&(c, _)| c);
            for window in sorted.windows(2) {
                if window[0].0 == window[1].0 {
                    return Err(Error::InvalidConfig(format!(
                        "row {r} repeats column {}",
                        window[0].0
                    )));
                }
            }
            for (c, v) in sorted {
                if c >= cols {
                    return Err(Error::DimensionMismatch(format!(
                        "row {r} references column {c} in a {cols}-column matrix"
                    )));
                }
                col_indices.push(c);
                values.push(v);
            }
        }
        Ok(Self { rows, cols, nnz_per_row, col_indices, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz_per_row(&self) -> usize {
        self.nnz_per_row
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = r * self.nnz_per_row;
        let hi = lo + self.nnz_per_row;
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Iterates all stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.col_indices
            .iter()
            .zip(&self.values)
            .enumerate()
            .map(|(i, (&c, &v))| (i / self.nnz_per_row, c, v))
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Multiplies every stored value by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    /// Dense copy, mostly for oracles and small-scale checks.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            dense[(r, c)] = v;
        }
        dense
    }

    /// Computes `self * rhs` where `rhs` is `cols x n` dense.
    pub fn mul_dense(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.rows, rhs.ncols());
        self.mul_dense_into(rhs, &mut out)?;
        Ok(out)
    }

    /// As [`mul_dense`](Self::mul_dense), writing into a preallocated
    /// `rows x n` output (avoids allocation in iteration loops).
    pub fn mul_dense_into(&self, rhs: &DMatrix<f64>, out: &mut DMatrix<f64>) -> Result<()> {
        if rhs.nrows() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "sparse ({}x{}) * dense ({}x{})",
                self.rows,
                self.cols,
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        if out.nrows() != self.rows || out.ncols() != rhs.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "output buffer is {}x{}, expected {}x{}",
                out.nrows(),
                out.ncols(),
                self.rows,
                rhs.ncols()
            )));
        }
        let n = rhs.ncols();
        let rhs_data = rhs.as_slice();
        let out_data = out.as_mut_slice();
        for j in 0..n {
            let rhs_col = &rhs_data[j * self.cols..(j + 1) * self.cols];
            let out_col = &mut out_data[j * self.rows..(j + 1) * self.rows];
            for (r, out_v) in out_col.iter_mut().enumerate() {
                let lo = r * self.nnz_per_row;
                let vals = &self.values[lo..lo + self.nnz_per_row];
                let cols = &self.col_indices[lo..lo + self.nnz_per_row];
                *out_v = vals.iter().zip(cols).map(|(w, &c)| w * rhs_col[c]).sum();
            }
        }
        Ok(())
    }

    /// Computes `self * v` for a dense vector.
    pub fn mul_vector(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.rows);
        self.mul_vector_into(v.as_slice(), out.as_mut_slice())?;
        Ok(out)
    }

    /// Slice-based matrix-vector product for hot loops.
    pub fn mul_vector_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        if v.len() != self.cols || out.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "sparse ({}x{}) * vector ({}), output {}",
                self.rows,
                self.cols,
                v.len(),
                out.len()
            )));
        }
        for (r, out_v) in out.iter_mut().enumerate() {
            let lo = r * self.nnz_per_row;
            let vals = &self.values[lo..lo + self.nnz_per_row];
            let cols = &self.col_indices[lo..lo + self.nnz_per_row];
            *out_v = vals.iter().zip(cols).map(|(w, &c)| w * v[c]).sum();
        }
        Ok(())
    }

    /// Operator 2-norm upper bound `sqrt(||.||_1 * ||.||_inf)`; cheap and
    /// adequate for contraction checks.
    pub fn norm_bound(&self) -> f64 {
        let mut row_sums = vec![0.0f64; self.rows];
        let mut col_sums = vec![0.0f64; self.cols];
        for (r, c, v) in self.triplets() {
            row_sums[r] += v.abs();
            col_sums[c] += v.abs();
        }
        let inf = row_sums.iter().cloned().fold(0.0f64, f64::max);
        let one = col_sums.iter().cloned().fold(0.0f64, f64::max);
        (inf * one).sqrt()
    }

    /// Exact spectral norm via dense SVD; intended for small matrices and
    /// verification paths.
    pub fn spectral_norm_dense(&self) -> f64 {
        self.to_dense().singular_values().max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SparseRowMatrix {
        SparseRowMatrix::from_rows(2, 3, 2, &[vec![(2, 0.5), (0, 1.0)], vec![(1, -2.0), (2, 3.0)]])
            .unwrap()
    }

    #[test]
    fn stores_rows_sorted() {
        let m = small();
        assert_eq!(m.row(0), (&[0, 2][..], &[1.0, 0.5][..]));
        assert_eq!(m.row(1), (&[1, 2][..], &[-2.0, 3.0][..]));
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(SparseRowMatrix::from_rows(1, 3, 2, &[vec![(0, 1.0)]]).is_err());
        assert!(SparseRowMatrix::from_rows(1, 3, 2, &[vec![(0, 1.0), (0, 2.0)]]).is_err());
        assert!(SparseRowMatrix::from_rows(1, 3, 2, &[vec![(0, 1.0), (3, 2.0)]]).is_err());
        assert!(SparseRowMatrix::from_rows(1, 2, 3, &[vec![(0, 1.0), (1, 2.0), (1, 3.0)]]).is_err());
    }

    #[test]
    fn matches_dense_product() {
        let m = small();
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let got = m.mul_dense(&x).unwrap();
        assert_eq!(got, m.to_dense() * &x);
    }

    #[test]
    fn vector_product_matches_dense() {
        let m = small();
        let v = DVector::from_vec(vec![1.0, -1.0, 2.0]);
        assert_eq!(m.mul_vector(&v).unwrap(), m.to_dense() * &v);
    }

    #[test]
    fn norm_bound_dominates_spectral_norm() {
        let m = small();
        assert!(m.norm_bound() >= m.spectral_norm_dense() - 1e-12);
    }

    #[test]
    fn scale_and_max_abs() {
        let mut m = small();
        assert_eq!(m.max_abs(), 3.0);
        m.scale(0.5);
        assert_eq!(m.max_abs(), 1.5);
        assert_eq!(m.row(0).1, &[0.5, 0.25]);
    }
}
