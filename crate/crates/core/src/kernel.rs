//! Kernel programs `min_w f(Kw) + (λ/2) wᵀKw`, the Gaussian kernel and
//! random Fourier features.
//!
//! Solutions are determined only up to `Ker(K)`, so callers should compare
//! `K^{1/2} w` (or `Kw`) rather than `w` itself.

use crate::error::{Error, Result};
use crate::matrices::{rank_tolerance, symmetric_eigen, DenseMatrix};
use crate::objectives::Objective;
use crate::random::{fill_gaussian, seeded_rng};
use crate::solver::{RidgeProgram, SolveReport, SolverOptions};
use faer::Mat;
use rand::Rng;
use std::f64::consts::TAU;

/// A symmetric positive semi-definite `n × n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    k: DenseMatrix,
}

impl KernelMatrix {
    /// Checks symmetry (within `1e-10`, relative to the largest entry when
    /// that exceeds one) and that `λ_min ≥ −1e-8 ‖K‖₂`.
    pub fn new(k: DenseMatrix) -> Result<Self> {
        let (n, c) = k.shape();
        if n != c {
            return Err(Error::param(format!("kernel matrix must be square, got {n}x{c}")));
        }
        let scale = k.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (k.get(i, j) - k.get(j, i)).abs() > 1e-10 * scale {
                    return Err(Error::param(format!("kernel matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let kernel = Self { k };
        let (values, _) = kernel.eigen()?;
        let top = values.last().copied().unwrap_or(0.0).max(0.0);
        if let Some(&low) = values.first() {
            if low < -1e-8 * top.max(f64::MIN_POSITIVE) && low < 0.0 {
                return Err(Error::param(format!(
                    "kernel matrix is indefinite: smallest eigenvalue {low:e}, largest {top:e}"
                )));
            }
        }
        Ok(kernel)
    }

    /// `K = A Aᵀ`.
    pub fn from_features(a: &DenseMatrix) -> Result<Self> {
        let gram: Mat<f64> = a.as_ref() * a.as_ref().transpose();
        Self::new(DenseMatrix::from_mat(symmetrized(gram))?)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.k.rows()
    }

    /// Eigenvalues (non-decreasing) and eigenvectors.
    pub fn eigen(&self) -> Result<(Vec<f64>, Mat<f64>)> {
        symmetric_eigen(self.k.mat())
    }

    /// `K^{1/2}` with negative eigenvalues clamped to zero.
    pub fn sqrt(&self) -> Result<DenseMatrix> {
        let (values, q) = self.eigen()?;
        let n = self.dim();
        let scaled = Mat::from_fn(n, n, |i, j| q[(i, j)] * values[j].max(0.0).sqrt());
        DenseMatrix::from_mat(symmetrized(&scaled * q.transpose()))
    }

    /// `(Q_r Λ_r^{1/2})`, an `n × r` factor with `B Bᵀ = K` on the numerical range.
    pub fn range_factor(&self) -> Result<DenseMatrix> {
        let (values, q) = self.eigen()?;
        let top = values.last().copied().unwrap_or(0.0);
        let tol = rank_tolerance(self.dim(), self.dim(), top);
        let keep: Vec<usize> = (0..values.len()).filter(|&j| values[j] > tol && values[j] > 0.0).collect();
        DenseMatrix::from_fn(self.dim(), keep.len(), |i, c| q[(i, keep[c])] * values[keep[c]].sqrt())
    }
}

fn symmetrized(m: Mat<f64>) -> Mat<f64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("bandwidth gamma must be positive, got {gamma}")))
    }
}

/// `K_ij = exp(−γ ‖x_i − x_j‖²)` over the rows of `x`.
pub fn gaussian_kernel(x: &DenseMatrix, gamma: f64) -> Result<KernelMatrix> {
    check_gamma(gamma)?;
    let n = x.rows();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| x.row(i)).collect();
    let k = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 1.0;
        }
        let d2: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum();
        (-gamma * d2).exp()
    })?;
    Ok(KernelMatrix { k })
}

/// Random Fourier feature map `φ(x) = √(2/D) cos(Wx + b)` approximating the
/// Gaussian kernel with bandwidth `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RffMap {
    /// `D × d_in`, entries `N(0, 2γ)`.
    pub frequencies: DenseMatrix,
    /// Uniform on `[0, 2π)`.
    pub phases: Vec<f64>,
    pub gamma: f64,
}

impl RffMap {
    pub fn new(input_dim: usize, features: usize, gamma: f64, seed: u64) -> Result<Self> {
        check_gamma(gamma)?;
        if features == 0 {
            return Err(Error::param("the number of random features D must be at least 1"));
        }
        let mut rng = seeded_rng(seed);
        let frequencies = DenseMatrix::from_mat(fill_gaussian(features, input_dim, (2.0 * gamma).sqrt(), &mut rng))?;
        let phases = (0..features).map(|_| rng.random_range(0.0..TAU)).collect();
        Ok(Self {
            frequencies,
            phases,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn input_dim(&self) -> usize {
        self.frequencies.cols()
    }

    /// Maps every row of `x`; returns `n × D`.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != self.input_dim() {
            return Err(Error::param(format!(
                "inputs have {} columns, the feature map expects {}",
                x.cols(),
                self.input_dim()
            )));
        }
        let proj: Mat<f64> = x.as_ref() * self.frequencies.as_ref().transpose();
        let scale = (2.0 / self.dim() as f64).sqrt();
        DenseMatrix::from_fn(x.rows(), self.dim(), |i, j| scale * (proj[(i, j)] + self.phases[j]).cos())
    }
}

pub fn rff_features(x: &DenseMatrix, features: usize, gamma: f64, seed: u64) -> Result<DenseMatrix> {
    RffMap::new(x.cols(), features, gamma, seed)?.apply(x)
}

#[derive(Clone, Debug)]
pub struct KernelSketchSolution {
    /// A minimizer of the unrescaled sketched program (not unique in general).
    pub alpha: Vec<f64>,
    /// `w̃ = −λ⁻¹ ∇f(K S̃ α*)`.
    pub w: Vec<f64>,
    /// Report of the rescaled solve; `solution` holds the rescaled variable.
    pub report: SolveReport,
    /// Numerical rank of `S̃ᵀ K S̃`.
    pub rank: usize,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("lambda must be positive, got {lambda}")))
    }
}

fn check_objective(k: &KernelMatrix, objective: &Objective) -> Result<()> {
    if objective.dim() != k.dim() {
        return Err(Error::param(format!(
            "objective has {} labels but the kernel is {}x{}",
            objective.dim(),
            k.dim(),
            k.dim()
        )));
    }
    Ok(())
}

/// Sketched kernel program with a fresh Gaussian `S̃ ∈ ℝ^{n×m}`. The draw
/// matches [`crate::sketch::adaptive_gaussian`] for the same seed.
pub fn solve_kernel_sketched(
    k: &KernelMatrix,
    objective: impl Into<Objective>,
    lambda: f64,
    m: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<KernelSketchSolution> {
    if m == 0 {
        return Err(Error::param("sketch size m must be at least 1"));
    }
    let stilde = DenseMatrix::from_mat(fill_gaussian(k.dim(), m, 1.0, &mut seeded_rng(seed)))?;
    solve_kernel_sketched_with(k, objective, lambda, &stilde, opts)
}

/// Sketched kernel program for a given `S̃`, solved as
/// `min_β f(Mβ) + (λ/2)‖β‖²` with `M = K S̃ R`, `R = (S̃ᵀKS̃)^{-1/2}`.
pub fn solve_kernel_sketched_with(
    k: &KernelMatrix,
    objective: impl Into<Objective>,
    lambda: f64,
    stilde: &DenseMatrix,
    opts: &SolverOptions,
) -> Result<KernelSketchSolution> {
    let objective = objective.into();
    check_lambda(lambda)?;
    check_objective(k, &objective)?;
    if stilde.rows() != k.dim() {
        return Err(Error::param(format!(
            "right factor has {} rows, the kernel is {}x{}",
            stilde.rows(),
            k.dim(),
            k.dim()
        )));
    }
    let m = stilde.cols();
    let ks: Mat<f64> = k.matrix().as_ref() * stilde.as_ref();
    let gram = symmetrized(stilde.as_ref().transpose() * &ks);
    let (values, v) = symmetric_eigen(&gram)?;
    let top = values.last().copied().unwrap_or(0.0);
    let tol = rank_tolerance(m, m, top);
    let keep: Vec<usize> = (0..m).filter(|&j| values[j] > tol && values[j] > 0.0).collect();
    let scaled = Mat::from_fn(m, keep.len(), |i, c| v[(i, keep[c])] / values[keep[c]].sqrt());
    let kept = Mat::from_fn(m, keep.len(), |i, c| v[(i, keep[c])]);
    let rescaler: Mat<f64> = &scaled * kept.transpose();
    let mmat: Mat<f64> = &ks * &rescaler;
    let report = RidgeProgram::new(mmat.as_ref(), lambda, &objective).solve(opts, None)?;
    let alpha = crate::matrices::mat_vec(rescaler.as_ref(), &report.solution);
    let w = report.dual_certificate.iter().map(|g| -g / lambda).collect();
    Ok(KernelSketchSolution {
        alpha,
        w,
        report,
        rank: keep.len(),
    })
}

#[derive(Clone, Debug)]
pub struct KernelPrimalSolution {
    /// `w* = −λ⁻¹ ∇f(K w*)`.
    pub w: Vec<f64>,
    /// Report of the solve in image coordinates `v = Bᵀw`, `B Bᵀ = K`.
    pub report: SolveReport,
}

/// Solves the kernel primal over image coordinates of `K`.
pub fn solve_kernel_primal(
    k: &KernelMatrix,
    objective: impl Into<Objective>,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<KernelPrimalSolution> {
    let objective = objective.into();
    check_lambda(lambda)?;
    check_objective(k, &objective)?;
    let b = k.range_factor()?;
    let report = RidgeProgram::new(b.as_ref(), lambda, &objective).solve(opts, None)?;
    let w = report.dual_certificate.iter().map(|g| -g / lambda).collect();
    Ok(KernelPrimalSolution { w, report })
}

/// `f(Kw) + (λ/2) wᵀKw`.
pub fn kernel_objective(k: &KernelMatrix, objective: &Objective, lambda: f64, w: &[f64]) -> f64 {
    let kw = k.matrix().mul_vec(w);
    let quad: f64 = kw.iter().zip(w).map(|(a, b)| a * b).sum();
    objective.value(&kw) + 0.5 * lambda * quad
}
