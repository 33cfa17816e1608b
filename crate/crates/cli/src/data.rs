//! Synthetic data: spectral-decay matrices with planted labels, and a
//! nonlinear binary classification task for the random-feature pipeline.

use crate::config::{LabelRule, ObjectiveName, ProfileSpec};
use crate::error::{CliError, Result};
use asketch::matrices::{gaussian_matrix, generate_decay_matrix, SpectralProfile};
use asketch::objectives::{LipschitzObjective, Objective, SmoothObjective};
use asketch::DenseMatrix;

/// Decorrelates seeds derived from the same base seed.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        // splitmix64 finalizer
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

pub fn profile_for(spec: &ProfileSpec, n: usize) -> SpectralProfile {
    let default_scale = (n as f64).sqrt();
    match *spec {
        ProfileSpec::Exponential { rate, scale } => SpectralProfile::Exponential {
            rate,
            scale: scale.unwrap_or(default_scale),
        },
        ProfileSpec::Polynomial { exponent, scale } => SpectralProfile::Polynomial {
            exponent,
            scale: scale.unwrap_or(default_scale),
        },
        ProfileSpec::FiniteRank { rank, scale } => SpectralProfile::FiniteRank {
            rank,
            scale: scale.unwrap_or(default_scale),
        },
    }
}

/// Labels from a planted vector `x_gd ~ N(0, I)`.
pub fn planted_labels(a: &DenseMatrix, objective: ObjectiveName, rule: LabelRule, seed: u64) -> Vec<f64> {
    let x_gd = gaussian_matrix(a.cols(), 1, seed).column(0);
    let scores = a.mul_vec(&x_gd);
    let rule = match rule {
        LabelRule::Auto => match objective {
            ObjectiveName::Logistic => LabelRule::Sign,
            ObjectiveName::Relu => LabelRule::Relu,
            ObjectiveName::Quadratic | ObjectiveName::Absolute => LabelRule::Linear,
        },
        r => r,
    };
    scores
        .into_iter()
        .map(|s| match rule {
            LabelRule::Sign => {
                if s > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            LabelRule::Relu => s.max(0.0),
            LabelRule::Linear | LabelRule::Auto => s,
        })
        .collect()
}

pub fn build_objective(name: ObjectiveName, labels: Vec<f64>) -> Result<Objective> {
    Ok(match name {
        ObjectiveName::Logistic => SmoothObjective::logistic(labels)?.into(),
        ObjectiveName::Relu => SmoothObjective::relu_relaxation(labels)?.into(),
        ObjectiveName::Quadratic => SmoothObjective::quadratic(labels)?.into(),
        ObjectiveName::Absolute => LipschitzObjective::absolute_deviation(labels)?.into(),
    })
}

/// A decay matrix and planted labels for one trial.
pub fn synthetic_problem(
    n: usize,
    d: usize,
    profile: &ProfileSpec,
    objective: ObjectiveName,
    rule: LabelRule,
    seed: u64,
) -> Result<(DenseMatrix, Vec<f64>)> {
    let a = generate_decay_matrix(n, d, &profile_for(profile, n), mix_seed(&[seed, 1]))?;
    let labels = planted_labels(&a, objective, rule, mix_seed(&[seed, 2]));
    Ok((a, labels))
}

/// Inputs `x ~ N(0, I_p)` with label `1[‖x‖² > p]`, a radially separated
/// pair of classes that no linear classifier on the raw inputs can fit.
pub fn radial_classification(samples: usize, input_dim: usize, seed: u64) -> Result<(DenseMatrix, Vec<f64>)> {
    if samples == 0 || input_dim == 0 {
        return Err(CliError::config("samples and input_dim must be positive"));
    }
    let x = gaussian_matrix(samples, input_dim, seed);
    let labels = (0..samples)
        .map(|i| {
            let r2: f64 = x.row(i).iter().map(|v| v * v).sum();
            if r2 > input_dim as f64 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok((x, labels))
}

/// First `count` rows.
pub fn take_rows(a: &DenseMatrix, start: usize, count: usize) -> Result<DenseMatrix> {
    Ok(DenseMatrix::from_fn(count, a.cols(), |i, j| a.get(start + i, j))?)
}
