use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::random::{fill_gaussian, seeded_rng};
use faer::Mat;
use rand::Rng;

/// Singular-value profile for synthetic data matrices.
///
/// Rates are expressed on the eigenvalues `ν_j = σ_j²` of `AAᵀ`, the
/// convention used by the sketch-dimension predictors: an exponential
/// profile with rate `κ` has `σ_j = scale · e^{-κ j / 2}` and a polynomial
/// profile with exponent `β` has `σ_j = scale · j^{-β}` (indices from 1).
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralProfile {
    /// `rank` singular values equal to `scale`, the rest zero.
    FiniteRank { rank: usize, scale: f64 },
    /// `ν_j = scale² e^{-rate · j}`.
    Exponential { rate: f64, scale: f64 },
    /// `ν_j = scale² j^{-2 · exponent}`, `exponent > 1/2`.
    Polynomial { exponent: f64, scale: f64 },
    /// Explicit non-increasing positive singular values; missing trailing
    /// values are zero.
    Explicit { values: Vec<f64> },
}

impl SpectralProfile {
    pub fn validate(&self) -> Result<()> {
        let positive_scale = |s: f64| {
            if s.is_finite() && s > 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!("scale must be positive, got {s}")))
            }
        };
        match self {
            SpectralProfile::FiniteRank { rank, scale } => {
                if *rank == 0 {
                    return Err(Error::param("finite-rank profile needs rank >= 1"));
                }
                positive_scale(*scale)
            }
            SpectralProfile::Exponential { rate, scale } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::param(format!(
                        "exponential rate must be positive, got {rate}"
                    )));
                }
                positive_scale(*scale)
            }
            SpectralProfile::Polynomial { exponent, scale } => {
                if !(exponent.is_finite() && *exponent > 0.5) {
                    return Err(Error::param(format!(
                        "polynomial exponent must exceed 1/2, got {exponent}"
                    )));
                }
                positive_scale(*scale)
            }
            SpectralProfile::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::param("explicit profile has no values"));
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::param("explicit singular values must be positive"));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::param("explicit singular values must be non-increasing"));
                }
                Ok(())
            }
        }
    }

    /// The first `count` singular values of the profile.
    pub fn singular_values(&self, count: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let values = match self {
            SpectralProfile::FiniteRank { rank, scale } => {
                if *rank > count {
                    return Err(Error::param(format!(
                        "rank {rank} exceeds the smaller dimension {count}"
                    )));
                }
                (0..count).map(|j| if j < *rank { *scale } else { 0.0 }).collect()
            }
            SpectralProfile::Exponential { rate, scale } => (1..=count)
                .map(|j| scale * (-0.5 * rate * j as f64).exp())
                .collect(),
            SpectralProfile::Polynomial { exponent, scale } => (1..=count)
                .map(|j| scale * (j as f64).powf(-exponent))
                .collect(),
            SpectralProfile::Explicit { values } => {
                if values.len() > count {
                    return Err(Error::param(format!(
                        "{} explicit values exceed the smaller dimension {count}",
                        values.len()
                    )));
                }
                let mut v = values.clone();
                v.resize(count, 0.0);
                v
            }
        };
        Ok(values)
    }
}

/// `rows × cols` matrix of i.i.d. standard normal entries drawn from `seed`.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = seeded_rng(seed);
    DenseMatrix {
        data: fill_gaussian(rows, cols, 1.0, &mut rng),
    }
}

/// `rows × cols` matrix with orthonormal columns, Haar-distributed: QR of a
/// Gaussian matrix with the signs of `R`'s diagonal folded into `Q`.
pub fn orthonormal_columns<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<Mat<f64>> {
    if cols > rows {
        return Err(Error::param(format!(
            "cannot fit {cols} orthonormal columns in dimension {rows}"
        )));
    }
    let g = fill_gaussian(rows, cols, 1.0, rng);
    let qr = g.qr();
    let mut q = qr.compute_thin_Q();
    let r = qr.thin_R();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            for i in 0..rows {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// Draws `A = U Σ Vᵀ` with Haar-random orthonormal `U` (`n × r`), `V`
/// (`d × r`), `r = min(n, d)`, and `Σ` taken from `profile`.
pub fn generate_decay_matrix(
    n: usize,
    d: usize,
    profile: &SpectralProfile,
    seed: u64,
) -> Result<DenseMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::param("matrix dimensions must be positive"));
    }
    let r = n.min(d);
    let sigma = profile.singular_values(r)?;
    let mut rng = seeded_rng(seed);
    let u = orthonormal_columns(n, r, &mut rng)?;
    let v = orthonormal_columns(d, r, &mut rng)?;
    let us = Mat::from_fn(n, r, |i, j| u[(i, j)] * sigma[j]);
    DenseMatrix::from_mat(&us * v.transpose())
}
