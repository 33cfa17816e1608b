//! Coordinate-separable convex losses `f(w) = Σ_i ℓ_i(w_i)` on the score
//! vector `w = A x`.
//!
//! Every loss reports the constants the error bounds consume: the
//! smoothness `μ` (a bound on the Hessian diagonal) for smooth losses and the
//! Lipschitz constant `L` for the non-smooth one.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum SmoothKind {
    Logistic,
    ReluRelaxation,
    Quadratic,
    /// Huber-smoothed absolute deviation with the given smoothing width.
    HuberDeviation(f64),
}

/// A convex, `μ`-smooth separable loss.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothObjective {
    kind: SmoothKind,
    labels: Vec<f64>,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::param(format!("{what} must not be empty")));
    }
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::param(format!("{what}[{i}] is not finite"))),
        None => Ok(()),
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl SmoothObjective {
    /// Binary logistic loss, labels in `{0, 1}`.
    pub fn logistic(labels: Vec<f64>) -> Result<Self> {
        check_finite(&labels, "labels")?;
        if let Some(i) = labels.iter().position(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::param(format!(
                "logistic labels must be 0 or 1, labels[{i}] = {}",
                labels[i]
            )));
        }
        Ok(Self { kind: SmoothKind::Logistic, labels })
    }

    /// `(2n)⁻¹ Σ (w_i)₊² − 2 w_i y_i`, the convex surrogate of a one-layer
    /// ReLU fit.
    pub fn relu_relaxation(labels: Vec<f64>) -> Result<Self> {
        check_finite(&labels, "labels")?;
        Ok(Self { kind: SmoothKind::ReluRelaxation, labels })
    }

    /// `½ ‖w − b‖²`.
    pub fn quadratic(target: Vec<f64>) -> Result<Self> {
        check_finite(&target, "target")?;
        Ok(Self { kind: SmoothKind::Quadratic, labels: target })
    }

    /// `n⁻¹ Σ h_δ(w_i − y_i)` with the Huber function `h_δ`; tends to the
    /// absolute deviation as `δ → 0`, with `μ = 1/(nδ)`.
    pub fn huber_deviation(labels: Vec<f64>, smoothing: f64) -> Result<Self> {
        check_finite(&labels, "labels")?;
        if !(smoothing.is_finite() && smoothing > 0.0) {
            return Err(Error::param(format!("smoothing must be positive, got {smoothing}")));
        }
        Ok(Self { kind: SmoothKind::HuberDeviation(smoothing), labels })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SmoothKind::Logistic => "logistic",
            SmoothKind::ReluRelaxation => "relu",
            SmoothKind::Quadratic => "quadratic",
            SmoothKind::HuberDeviation(_) => "huber",
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    fn inv_n(&self) -> f64 {
        1.0 / self.labels.len() as f64
    }

    /// Smoothness constant: `sup_w max_i ∂²f/∂w_i²`.
    pub fn smoothness(&self) -> f64 {
        match self.kind {
            SmoothKind::Logistic => 0.25 * self.inv_n(),
            SmoothKind::ReluRelaxation => self.inv_n(),
            SmoothKind::Quadratic => 1.0,
            SmoothKind::HuberDeviation(delta) => self.inv_n() / delta,
        }
    }

    /// The Hessian diagonal entry when it does not depend on `w`.
    pub fn constant_curvature(&self) -> Option<f64> {
        match self.kind {
            SmoothKind::Quadratic => Some(1.0),
            _ => None,
        }
    }

    /// `ℓ_i(u)`.
    pub fn coordinate_value(&self, i: usize, u: f64) -> f64 {
        let y = self.labels[i];
        match self.kind {
            SmoothKind::Logistic => self.inv_n() * (y * softplus(-u) + (1.0 - y) * softplus(u)),
            SmoothKind::ReluRelaxation => {
                let p = u.max(0.0);
                0.5 * self.inv_n() * (p * p - 2.0 * u * y)
            }
            SmoothKind::Quadratic => 0.5 * (u - y) * (u - y),
            SmoothKind::HuberDeviation(delta) => {
                let r = (u - y).abs();
                let h = if r <= delta { 0.5 * r * r / delta } else { r - 0.5 * delta };
                self.inv_n() * h
            }
        }
    }

    /// `ℓ_i'(u)`.
    pub fn coordinate_derivative(&self, i: usize, u: f64) -> f64 {
        let y = self.labels[i];
        match self.kind {
            SmoothKind::Logistic => self.inv_n() * (sigmoid(u) - y),
            SmoothKind::ReluRelaxation => self.inv_n() * (u.max(0.0) - y),
            SmoothKind::Quadratic => u - y,
            SmoothKind::HuberDeviation(delta) => self.inv_n() * ((u - y) / delta).clamp(-1.0, 1.0),
        }
    }

    /// `ℓ_i''(u)`.
    pub fn coordinate_curvature(&self, i: usize, u: f64) -> f64 {
        let y = self.labels[i];
        match self.kind {
            SmoothKind::Logistic => {
                let p = sigmoid(u);
                self.inv_n() * p * (1.0 - p)
            }
            SmoothKind::ReluRelaxation => {
                if u > 0.0 {
                    self.inv_n()
                } else {
                    0.0
                }
            }
            SmoothKind::Quadratic => 1.0,
            SmoothKind::HuberDeviation(delta) => {
                if (u - y).abs() < delta {
                    self.inv_n() / delta
                } else {
                    0.0
                }
            }
        }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.check_dim(w);
        w.iter().enumerate().map(|(i, &u)| self.coordinate_value(i, u)).sum()
    }

    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.check_dim(w);
        w.iter().enumerate().map(|(i, &u)| self.coordinate_derivative(i, u)).collect()
    }

    pub fn hessian_diagonal(&self, w: &[f64]) -> Vec<f64> {
        self.check_dim(w);
        w.iter().enumerate().map(|(i, &u)| self.coordinate_curvature(i, u)).collect()
    }

    fn check_dim(&self, w: &[f64]) {
        assert_eq!(w.len(), self.dim(), "objective of dimension {} evaluated at a vector of length {}", self.dim(), w.len());
    }
}

/// A convex, `L`-Lipschitz separable loss.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzObjective {
    labels: Vec<f64>,
}

impl LipschitzObjective {
    /// `n⁻¹ Σ |w_i − y_i|`, Lipschitz with `L = n^{-1/2}`.
    pub fn absolute_deviation(labels: Vec<f64>) -> Result<Self> {
        check_finite(&labels, "labels")?;
        Ok(Self { labels })
    }

    pub fn name(&self) -> &'static str {
        "absolute"
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn lipschitz(&self) -> f64 {
        1.0 / (self.dim() as f64).sqrt()
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.dim());
        let n = self.dim() as f64;
        w.iter().zip(&self.labels).map(|(u, y)| (u - y).abs()).sum::<f64>() / n
    }

    /// The subgradient `n⁻¹ sign(w − y)`, taking 0 at kinks.
    pub fn subgradient(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.dim());
        let n = self.dim() as f64;
        w.iter()
            .zip(&self.labels)
            .map(|(u, y)| {
                let r = u - y;
                if r > 0.0 {
                    1.0 / n
                } else if r < 0.0 {
                    -1.0 / n
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Huber-smoothed version with width `smoothing`.
    pub fn smoothed(&self, smoothing: f64) -> Result<SmoothObjective> {
        SmoothObjective::huber_deviation(self.labels.clone(), smoothing)
    }
}

/// Either kind of loss, as carried by a problem.
#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    Smooth(SmoothObjective),
    Lipschitz(LipschitzObjective),
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::Smooth(f) => f.name(),
            Objective::Lipschitz(f) => f.name(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::Smooth(f) => f.dim(),
            Objective::Lipschitz(f) => f.dim(),
        }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        match self {
            Objective::Smooth(f) => f.value(w),
            Objective::Lipschitz(f) => f.value(w),
        }
    }

    /// Gradient for smooth losses, the kink-zero subgradient otherwise.
    pub fn first_order(&self, w: &[f64]) -> Vec<f64> {
        match self {
            Objective::Smooth(f) => f.gradient(w),
            Objective::Lipschitz(f) => f.subgradient(w),
        }
    }

    pub fn as_smooth(&self) -> Option<&SmoothObjective> {
        match self {
            Objective::Smooth(f) => Some(f),
            Objective::Lipschitz(_) => None,
        }
    }
}

impl From<SmoothObjective> for Objective {
    fn from(f: SmoothObjective) -> Self {
        Objective::Smooth(f)
    }
}

impl From<LipschitzObjective> for Objective {
    fn from(f: LipschitzObjective) -> Self {
        Objective::Lipschitz(f)
    }
}
