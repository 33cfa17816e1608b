//! Dense matrices, synthetic spectral-decay generators, SVD utilities and
//! matrix file I/O.
//!
//! [`DenseMatrix`] wraps a [`faer::Mat`] and guarantees that every entry is
//! finite. The row-major view used by the file formats is available through
//! [`DenseMatrix::from_row_major`] and [`DenseMatrix::to_row_major`].

mod generate;
mod io;
mod svd;

pub use generate::{generate_decay_matrix, gaussian_matrix, orthonormal_columns, SpectralProfile};
pub use io::{
    decode_binary, encode_binary, load_matrix, parse_csv, save_matrix, write_csv, MatrixFormat,
    BINARY_MAGIC, BINARY_VERSION,
};
pub(crate) use svd::symmetric_eigen;
pub use svd::{numerical_rank, rank_tolerance, singular_values, spectral_norm, svd, SvdFactors};

use crate::error::{Error, Result};
use faer::{Col, ColRef, Mat, MatRef};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    data: Mat<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: Mat::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: Mat::identity(n, n),
        }
    }

    /// Square matrix with `values` on the diagonal.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_mat(Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }))
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::param(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows.saturating_mul(cols),
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self {
            data: Mat::from_fn(rows, cols, |i, j| entries[i * cols + j]),
        })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("rows have different lengths"));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    /// Column vector (`len × 1`).
    pub fn column_vector(values: &[f64]) -> Result<Self> {
        Self::from_row_major(values.len(), 1, values.to_vec())
    }

    /// Wraps a faer matrix, rejecting non-finite entries.
    pub fn from_mat(data: Mat<f64>) -> Result<Self> {
        let finite = (0..data.ncols()).all(|j| data.col(j).iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
        Ok(Self { data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::from_mat(Mat::from_fn(rows, cols, f))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    pub fn as_ref(&self) -> MatRef<'_, f64> {
        self.data.as_ref()
    }

    pub fn mat(&self) -> &Mat<f64> {
        &self.data
    }

    pub fn into_mat(self) -> Mat<f64> {
        self.data
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols()).map(|j| self.data[(i, j)]).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.col(j).iter().copied().collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose().to_owned(),
        }
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::param(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Self::from_mat(&self.data * &rhs.data)
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(self.as_ref(), x)
    }

    /// `Aᵀ y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        mat_vec(self.as_ref().transpose(), y)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.norm_max()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_mat(Mat::from_fn(self.rows(), self.cols(), |i, j| {
            factor * self.data[(i, j)]
        }))
    }
}

/// `M x` for a faer view and a slice.
pub(crate) fn mat_vec(m: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(m.ncols(), x.len(), "dimension mismatch in matrix-vector product");
    let y: Col<f64> = m * ColRef::from_slice(x);
    y.iter().copied().collect()
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
