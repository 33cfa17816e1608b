use super::DenseMatrix;
use crate::error::{Error, Result};
use faer::Mat;

/// Thin SVD `A = left · diag(singulars) · right_t`.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    /// `n × r`, orthonormal columns.
    pub left: DenseMatrix,
    /// Non-increasing, length `r = min(n, d)`.
    pub singulars: Vec<f64>,
    /// `r × d`, orthonormal rows.
    pub right_t: DenseMatrix,
}

impl SvdFactors {
    /// Singular values at or below this are treated as zero.
    pub fn tolerance(&self) -> f64 {
        rank_tolerance(
            self.left.rows(),
            self.right_t.cols(),
            self.singulars.first().copied().unwrap_or(0.0),
        )
    }

    pub fn rank(&self) -> usize {
        let tol = self.tolerance();
        self.singulars.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let r = self.singulars.len();
        let left = self.left.as_ref();
        let scaled = Mat::from_fn(left.nrows(), r, |i, j| left[(i, j)] * self.singulars[j]);
        DenseMatrix {
            data: &scaled * self.right_t.as_ref(),
        }
    }
}

/// Rank cut-off `max(n, d) · ε · σ_max` used by every pseudo-inverse.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

pub fn numerical_rank(singulars: &[f64], rows: usize, cols: usize) -> usize {
    let tol = rank_tolerance(rows, cols, singulars.first().copied().unwrap_or(0.0));
    singulars.iter().filter(|&&s| s > tol).count()
}

pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    let (n, d) = a.shape();
    let r = n.min(d);
    if r == 0 {
        return Ok(SvdFactors {
            left: DenseMatrix::zeros(n, 0),
            singulars: Vec::new(),
            right_t: DenseMatrix::zeros(0, d),
        });
    }
    let dec = a
        .mat()
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD of a {n}x{d} matrix did not converge: {e:?}")))?;
    let singulars: Vec<f64> = dec.S().column_vector().iter().copied().collect();
    Ok(SvdFactors {
        left: DenseMatrix::from_mat(dec.U().to_owned())?,
        singulars,
        right_t: DenseMatrix::from_mat(dec.V().transpose().to_owned())?,
    })
}

pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows().min(a.cols()) == 0 {
        return Ok(Vec::new());
    }
    a.mat().singular_values().map_err(|e| {
        Error::Numerical(format!(
            "singular values of a {}x{} matrix did not converge: {e:?}",
            a.rows(),
            a.cols()
        ))
    })
}

pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Eigenvalues (non-decreasing) and eigenvectors of a symmetric matrix; only
/// the lower triangle is read.
pub(crate) fn symmetric_eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let dec = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigendecomposition failed: {e:?}")))?;
    let values = dec.S().column_vector().iter().copied().collect();
    Ok((values, dec.U().to_owned()))
}
