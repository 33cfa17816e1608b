//! Error bounds and sketch-dimension predictors.
//!
//! The approximation error of adaptive sketching is governed by
//! `Z = ‖P_S⊥ Aᵀ‖₂`, the part of the row space of `A` missed by the sketch,
//! which itself concentrates around the spectral tail
//! `R_k(A) = (σ_k² + k⁻¹ Σ_{j>k} σ_j²)^{1/2}`.

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;
use crate::matrices::{numerical_rank, rank_tolerance, singular_values, spectral_norm, symmetric_eigen, DenseMatrix};
use crate::sketch::{adaptive_gaussian, SketchOperator};
use faer::Mat;
use std::fmt;
use std::str::FromStr;

/// Universal constant in the high-probability bounds.
pub const C0: f64 = 36.0;

/// Orthonormal basis of the numerical range of `m`.
fn range_basis(m: &DenseMatrix) -> Result<Mat<f64>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Mat::zeros(rows, 0));
    }
    let dec = m
        .mat()
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let s: Vec<f64> = dec.S().column_vector().iter().copied().collect();
    let tol = rank_tolerance(rows, cols, s.first().copied().unwrap_or(0.0));
    let r = s.iter().take_while(|&&v| v > tol && v > 0.0).count();
    Ok(dec.U().subcols(0, r).to_owned())
}

/// `‖(I − Q Qᵀ) B‖₂` for orthonormal `Q`.
fn residual_norm(q: &Mat<f64>, b: &Mat<f64>) -> Result<f64> {
    let proj: Mat<f64> = q * (q.transpose() * b);
    spectral_norm(&DenseMatrix::from_mat(b - proj)?)
}

/// `‖P_S⊥ Aᵀ‖₂` with `P_S` the orthogonal projector onto `range(S)`.
pub fn zf_surrogate(a: &DenseMatrix, s: &SketchOperator) -> Result<f64> {
    let smat = s.matrix();
    if smat.rows() != a.cols() {
        return Err(Error::param(format!(
            "sketch has {} rows but A has {} columns",
            smat.rows(),
            a.cols()
        )));
    }
    residual_norm(&range_basis(smat)?, &a.transpose().into_mat())
}

/// `√‖K − K S̃ (S̃ᵀ K S̃)† S̃ᵀ K‖₂` with `K = A Aᵀ`; equals [`zf_surrogate`]
/// for `S = Aᵀ S̃`.
pub fn zf_surrogate_gram(a: &DenseMatrix, stilde: &DenseMatrix) -> Result<f64> {
    if stilde.rows() != a.rows() {
        return Err(Error::param("right factor must have as many rows as A"));
    }
    let k: Mat<f64> = a.as_ref() * a.as_ref().transpose();
    let ks: Mat<f64> = &k * stilde.as_ref();
    let g: Mat<f64> = stilde.as_ref().transpose() * &ks;
    let (values, v) = symmetric_eigen(&g)?;
    let m = values.len();
    let tol = rank_tolerance(m, m, values.last().copied().unwrap_or(0.0));
    let keep: Vec<usize> = (0..m).filter(|&j| values[j] > tol && values[j] > 0.0).collect();
    // K S̃ V_r Λ_r^{-1/2}
    let w = Mat::from_fn(m, keep.len(), |i, c| v[(i, keep[c])] / values[keep[c]].sqrt());
    let f: Mat<f64> = &ks * &w;
    let resid: Mat<f64> = &k - &f * f.transpose();
    let n = resid.nrows();
    let sym = Mat::from_fn(n, n, |i, j| 0.5 * (resid[(i, j)] + resid[(j, i)]));
    let (ev, _) = symmetric_eigen(&sym)?;
    let top = ev.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(top.sqrt())
}

/// `‖P⊥_{K^{1/2} S̃} K^{1/2}‖₂`.
pub fn kernel_zf(k: &KernelMatrix, stilde: &DenseMatrix) -> Result<f64> {
    if stilde.rows() != k.dim() {
        return Err(Error::param("right factor must have as many rows as K"));
    }
    let root = k.sqrt()?;
    let b = root.matmul(stilde)?;
    residual_norm(&range_basis(&b)?, root.mat())
}

/// `R_k` from singular values, summing the tail over indices `k+1 ..= ρ`.
pub fn rk_from_singulars(singulars: &[f64], rank: usize, k: usize) -> Result<f64> {
    if k == 0 || k > rank {
        return Err(Error::param(format!("k = {k} must lie in 1..={rank} (numerical rank)")));
    }
    let tail: f64 = singulars[k..rank].iter().map(|s| s * s).sum();
    Ok((singulars[k - 1].powi(2) + tail / k as f64).sqrt())
}

pub fn spectral_tail_rk(a: &DenseMatrix, k: usize) -> Result<f64> {
    let s = singular_values(a)?;
    let rank = numerical_rank(&s, a.rows(), a.cols());
    rk_from_singulars(&s, rank, k)
}

fn check_nonneg(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !(v.is_finite() && *v >= 0.0) {
            return Err(Error::param(format!("{name} must be finite and non-negative, got {v}")));
        }
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("lambda must be positive, got {lambda}")))
    }
}

/// `(√(μ/2λ) z ‖x*‖, λ ≥ 2μz²)`.
pub fn theorem1_bound(mu: f64, lambda: f64, z: f64, norm_xstar: f64) -> Result<(f64, bool)> {
    check_lambda(lambda)?;
    check_nonneg(&[("mu", mu), ("z", z), ("norm_xstar", norm_xstar)])?;
    Ok(((mu / (2.0 * lambda)).sqrt() * z * norm_xstar, lambda >= 2.0 * mu * z * z))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corollary1Bound {
    /// Multiplier of `‖x*‖₂`: `c0 √(μ/2λ) R_k`.
    pub bound: f64,
    pub lambda_required: f64,
    pub failure_prob: f64,
    pub r_k: f64,
    pub c0: f64,
}

pub fn corollary1_bound(mu: f64, lambda: f64, a: &DenseMatrix, k: usize) -> Result<Corollary1Bound> {
    check_lambda(lambda)?;
    check_nonneg(&[("mu", mu)])?;
    let upper = a.rows().min(a.cols()) / 2;
    if k < 2 || k > upper {
        return Err(Error::param(format!("k = {k} must lie in 2..={upper}")));
    }
    let r_k = spectral_tail_rk(a, k)?;
    Ok(Corollary1Bound {
        bound: C0 * (mu / (2.0 * lambda)).sqrt() * r_k,
        lambda_required: 2.0 * C0 * C0 * mu * r_k * r_k,
        failure_prob: 12.0 * (-(k as f64)).exp(),
        r_k,
        c0: C0,
    })
}

/// Contraction after `T` refinement steps: `(μz²/2λ)^{T/2}`.
pub fn theorem2_bound(mu: f64, lambda: f64, z: f64, t: usize) -> Result<f64> {
    check_lambda(lambda)?;
    check_nonneg(&[("mu", mu), ("z", z)])?;
    if t == 0 {
        return Err(Error::param("T must be at least 1"));
    }
    Ok((mu * z * z / (2.0 * lambda)).powf(t as f64 / 2.0))
}

/// `(6L/λ) √(σ₁ z)` for `L`-Lipschitz losses.
pub fn theorem4_nonsmooth_bound(lipschitz: f64, lambda: f64, sigma1: f64, z: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_nonneg(&[("L", lipschitz), ("sigma1", sigma1), ("z", z)])?;
    Ok(6.0 * lipschitz / lambda * (sigma1 * z).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub zf_surrogate: f64,
    pub r_k: f64,
    pub k: usize,
    pub c0: f64,
    /// `2μ z²`.
    pub lambda_threshold: f64,
    /// `√(μ/2λ) z`, the bound on `‖x̃ − x*‖ / ‖x*‖`.
    pub predicted_relative_error: f64,
    pub hypothesis_satisfied: bool,
}

pub fn bound_report(a: &DenseMatrix, s: &SketchOperator, mu: f64, lambda: f64, k: usize) -> Result<BoundReport> {
    let z = zf_surrogate(a, s)?;
    let (pred, ok) = theorem1_bound(mu, lambda, z, 1.0)?;
    Ok(BoundReport {
        zf_surrogate: z,
        r_k: spectral_tail_rk(a, k)?,
        k,
        c0: C0,
        lambda_threshold: 2.0 * mu * z * z,
        predicted_relative_error: pred,
        hypothesis_satisfied: ok,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Check {
    pub k: usize,
    pub trials: usize,
    /// Fraction of trials with `Z ≤ c0 R_k`.
    pub success_rate: f64,
    /// `1 − 6e^{−k}`.
    pub required_rate: f64,
    pub r_k: f64,
    pub surrogates: Vec<f64>,
}

/// Draws adaptive sketches of size `m = 2k` with seeds `seed + i` and
/// checks `‖P_S⊥Aᵀ‖₂ ≤ 36 R_k(A)`.
pub fn lemma1_check(a: &DenseMatrix, k: usize, trials: usize, seed: u64) -> Result<Lemma1Check> {
    let m = 2 * k;
    if k == 0 || m > a.rows().min(a.cols()) {
        return Err(Error::param(format!(
            "need 1 ≤ k and 2k ≤ min(n, d) = {}, got k = {k}",
            a.rows().min(a.cols())
        )));
    }
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let r_k = spectral_tail_rk(a, k)?;
    let surrogates = (0..trials)
        .map(|i| zf_surrogate(a, &adaptive_gaussian(a, m, seed.wrapping_add(i as u64))?))
        .collect::<Result<Vec<_>>>()?;
    let hits = surrogates.iter().filter(|&&z| z <= C0 * r_k).count();
    Ok(Lemma1Check {
        k,
        trials,
        success_rate: hits as f64 / trials as f64,
        required_rate: 1.0 - 6.0 * (-(k as f64)).exp(),
        r_k,
        surrogates,
    })
}

/// Spectral regime of the data matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regime {
    /// Rank `ρ`.
    FiniteRank { rho: usize },
    /// `σ_j² ∝ e^{−κ j}`.
    Exponential { kappa: f64 },
    /// `σ_j ∝ j^{−β}`.
    Polynomial { beta: f64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::FiniteRank { .. } => "finite-rank",
            Regime::Exponential { .. } => "exponential",
            Regime::Polynomial { .. } => "polynomial",
        }
    }
}

/// Regime names accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeKind {
    Rank,
    Exp,
    Poly,
}

impl FromStr for RegimeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank" | "finite-rank" => Ok(RegimeKind::Rank),
            "exp" | "exponential" => Ok(RegimeKind::Exp),
            "poly" | "polynomial" => Ok(RegimeKind::Poly),
            _ => Err(Error::param(format!("unknown regime {s:?}; expected rank, exp or poly"))),
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeKind::Rank => "rank",
            RegimeKind::Exp => "exp",
            RegimeKind::Poly => "poly",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionPrediction {
    pub regime: Regime,
    pub eps: f64,
    pub eta: f64,
    pub lambda: f64,
    pub d: usize,
    pub m_adaptive: f64,
    pub m_oblivious: f64,
    pub m_leverage: f64,
    /// `m_O / m_A`.
    pub oblivious_ratio: f64,
    /// `m_S / m_A`.
    pub leverage_ratio: f64,
}

/// Sketch sizes sufficient for relative error `ε` with probability `1 − η`,
/// for adaptive Gaussian, oblivious Gaussian and leverage-score sketches.
/// Order-level estimates without hidden constants; natural logarithms.
pub fn predict_dimensions(regime: Regime, eps: f64, eta: f64, lambda: f64, d: usize) -> Result<DimensionPrediction> {
    for (name, v) in [("eps", eps), ("eta", eta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::param(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    check_lambda(lambda)?;
    if d == 0 {
        return Err(Error::param("d must be at least 1"));
    }
    let ln = f64::ln;
    let (m_a, m_o, m_s) = match regime {
        Regime::FiniteRank { rho } => {
            if rho == 0 || rho > d {
                return Err(Error::param(format!("rank rho = {rho} must lie in 1..={d}")));
            }
            let r = rho as f64;
            (
                r + 1.0 + ln(12.0 / eta),
                (r + 1.0) / (eps * eps) * ln(2.0 * r / eta),
                (r + 1.0) * ln(4.0 * r / eta),
            )
        }
        Regime::Exponential { kappa } => {
            if !(kappa.is_finite() && kappa > 0.0) {
                return Err(Error::param(format!("decay rate kappa must be positive, got {kappa}")));
            }
            if lambda >= 1.0 {
                return Err(Error::param(format!("the exponential regime needs lambda < 1, got {lambda}")));
            }
            let head = ln(1.0 / (lambda * eps)) / kappa;
            (
                head + ln(12.0 / eta),
                ln(1.0 / lambda) * ln(2.0 * d as f64 / eta) / (kappa * eps * eps),
                head * ln(1.0 / eta),
            )
        }
        Regime::Polynomial { beta } => {
            if !(beta.is_finite() && beta > 0.5) {
                return Err(Error::param(format!("decay exponent beta must exceed 1/2, got {beta}")));
            }
            let scale = lambda.powf(-1.0 / (2.0 * beta));
            let head = scale * eps.powf(-1.0 / beta);
            let exponent = if beta <= 2.0 { 2.0 } else { beta / (beta - 1.0) };
            (
                head + ln(12.0 / eta),
                scale / (eps * eps) * ln(2.0 * d as f64 / eta),
                head.powf(exponent) * ln(1.0 / eta),
            )
        }
    };
    Ok(DimensionPrediction {
        regime,
        eps,
        eta,
        lambda,
        d,
        m_adaptive: m_a,
        m_oblivious: m_o,
        m_leverage: m_s,
        oblivious_ratio: m_o / m_a,
        leverage_ratio: m_s / m_a,
    })
}
