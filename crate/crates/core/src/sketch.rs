//! Sketching matrices `S ∈ ℝ^{d×m}`.
//!
//! Adaptive constructions have the form `S = Aᵀ S̃` for a random right
//! factor `S̃ ∈ ℝ^{n×m}`, so the sketch lives in the row space of `A`. The
//! oblivious Gaussian sketch ignores `A`.

use crate::error::{Error, Result};
use crate::matrices::{svd, DenseMatrix};
use crate::random::{fill_gaussian, seeded_rng};
use faer::Mat;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

/// Largest supported number of power iterations; iterates are not
/// re-orthonormalized.
pub const MAX_POWER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SketchKind {
    AdaptiveGaussian,
    ObliviousGaussian,
    LeverageScore,
    UniformColumns,
    Power,
    /// A caller-supplied matrix.
    Explicit,
}

impl SketchKind {
    pub const ALL: [SketchKind; 5] = [
        SketchKind::AdaptiveGaussian,
        SketchKind::ObliviousGaussian,
        SketchKind::LeverageScore,
        SketchKind::UniformColumns,
        SketchKind::Power,
    ];

    /// Short name used on the command line and in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            SketchKind::AdaptiveGaussian => "adaptive",
            SketchKind::ObliviousGaussian => "oblivious",
            SketchKind::LeverageScore => "leverage",
            SketchKind::UniformColumns => "uniform",
            SketchKind::Power => "power",
            SketchKind::Explicit => "explicit",
        }
    }

    pub fn is_adaptive(self) -> bool {
        !matches!(self, SketchKind::ObliviousGaussian | SketchKind::Explicit)
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SketchKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown sketch kind {s:?}")))
    }
}

/// A materialized sketch and how it was built.
#[derive(Clone, Debug)]
pub struct SketchOperator {
    kind: SketchKind,
    matrix: DenseMatrix,
    stilde: Option<DenseMatrix>,
    power: usize,
    target_rank: Option<usize>,
    seed: u64,
    leverage_scores: Option<Vec<f64>>,
}

impl SketchOperator {
    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    /// `S`, `d × m`.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// The right factor `S̃` (`n × m`) of adaptive sketches.
    pub fn stilde(&self) -> Option<&DenseMatrix> {
        self.stilde.as_ref()
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn target_rank(&self) -> Option<usize> {
        self.target_rank
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sampling distribution of a leverage-score sketch.
    pub fn leverage_scores(&self) -> Option<&[f64]> {
        self.leverage_scores.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn sketch_size(&self) -> usize {
        self.matrix.cols()
    }

    fn adaptive(kind: SketchKind, a: &DenseMatrix, stilde: DenseMatrix, power: usize, seed: u64) -> Result<Self> {
        if stilde.rows() != a.rows() {
            return Err(Error::param(format!(
                "right factor has {} rows but the data matrix has {}",
                stilde.rows(),
                a.rows()
            )));
        }
        let at = a.as_ref().transpose();
        let mut s: Mat<f64> = at * stilde.as_ref();
        for _ in 0..power {
            let as_ = a.as_ref() * &s;
            s = at * &as_;
        }
        Ok(Self {
            kind,
            matrix: DenseMatrix::from_mat(s)?,
            stilde: Some(stilde),
            power,
            target_rank: None,
            seed,
            leverage_scores: None,
        })
    }
}

fn check_size(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::param("sketch size m must be at least 1"))
    } else {
        Ok(())
    }
}

/// `S = Aᵀ S̃` with `S̃` standard Gaussian.
pub fn adaptive_gaussian(a: &DenseMatrix, m: usize, seed: u64) -> Result<SketchOperator> {
    power_sketch(a, m, 0, seed)
}

/// `S = Aᵀ S̃` for a caller-supplied `S̃`.
pub fn adaptive_from_stilde(a: &DenseMatrix, stilde: DenseMatrix) -> Result<SketchOperator> {
    check_size(stilde.cols())?;
    SketchOperator::adaptive(SketchKind::AdaptiveGaussian, a, stilde, 0, 0)
}

/// `S = (AᵀA)^q Aᵀ S̃` with `S̃` standard Gaussian. `q = 0` is exactly
/// [`adaptive_gaussian`].
pub fn power_sketch(a: &DenseMatrix, m: usize, q: usize, seed: u64) -> Result<SketchOperator> {
    check_size(m)?;
    let mut rng = seeded_rng(seed);
    let stilde = DenseMatrix::from_mat(fill_gaussian(a.rows(), m, 1.0, &mut rng))?;
    power_from_stilde(a, stilde, q, seed)
}

/// Power sketch for a caller-supplied `S̃`.
pub fn power_from_stilde(a: &DenseMatrix, stilde: DenseMatrix, q: usize, seed: u64) -> Result<SketchOperator> {
    check_size(stilde.cols())?;
    if q > MAX_POWER {
        return Err(Error::param(format!("power q = {q} exceeds the supported maximum {MAX_POWER}")));
    }
    let kind = if q == 0 { SketchKind::AdaptiveGaussian } else { SketchKind::Power };
    SketchOperator::adaptive(kind, a, stilde, q, seed)
}

/// Wraps an arbitrary `d × m` matrix.
pub fn explicit_sketch(s: DenseMatrix) -> SketchOperator {
    SketchOperator {
        kind: SketchKind::Explicit,
        matrix: s,
        stilde: None,
        power: 0,
        target_rank: None,
        seed: 0,
        leverage_scores: None,
    }
}

/// Data-independent sketch with i.i.d. `N(0, 1/d)` entries.
pub fn oblivious_gaussian(d: usize, m: usize, seed: u64) -> Result<SketchOperator> {
    check_size(m)?;
    let mut rng = seeded_rng(seed);
    let s = fill_gaussian(d, m, 1.0 / (d as f64).sqrt(), &mut rng);
    Ok(SketchOperator {
        kind: SketchKind::ObliviousGaussian,
        matrix: DenseMatrix::from_mat(s)?,
        stilde: None,
        power: 0,
        target_rank: None,
        seed,
        leverage_scores: None,
    })
}

/// Rank-`k` leverage-score distribution `p_j = ‖(U_k)_{j,:}‖² / k` over the
/// rows of `A` (equivalently the columns of `AAᵀ`).
pub fn leverage_scores(a: &DenseMatrix, k: usize) -> Result<Vec<f64>> {
    let f = svd(a)?;
    let rank = f.rank();
    if k == 0 || k > rank {
        return Err(Error::param(format!("target rank k = {k} must lie in 1..={rank} (numerical rank)")));
    }
    let u = f.left.as_ref();
    Ok((0..a.rows())
        .map(|j| (0..k).map(|c| u[(j, c)] * u[(j, c)]).sum::<f64>() / k as f64)
        .collect())
}

/// `S = Aᵀ R D`: `m` rows of `A` drawn i.i.d. (with replacement) from the
/// rank-`k` leverage scores, each rescaled by `(m p_j)^{-1/2}`.
pub fn leverage_score_sampling(a: &DenseMatrix, m: usize, k: usize, seed: u64) -> Result<SketchOperator> {
    check_size(m)?;
    let scores = leverage_scores(a, k)?;
    let dist = WeightedIndex::new(&scores)
        .map_err(|e| Error::Numerical(format!("invalid leverage distribution: {e}")))?;
    let mut rng = seeded_rng(seed);
    let mut stilde = Mat::zeros(a.rows(), m);
    for col in 0..m {
        let j = dist.sample(&mut rng);
        stilde[(j, col)] = 1.0 / (m as f64 * scores[j]).sqrt();
    }
    let mut op = SketchOperator::adaptive(SketchKind::LeverageScore, a, DenseMatrix::from_mat(stilde)?, 0, seed)?;
    op.target_rank = Some(k);
    op.leverage_scores = Some(scores);
    Ok(op)
}

/// `S = Aᵀ S̃` where each column of `S̃` selects one uniformly drawn row
/// (Nyström-style column sub-sampling of `AAᵀ`).
pub fn uniform_columns(a: &DenseMatrix, m: usize, seed: u64) -> Result<SketchOperator> {
    check_size(m)?;
    if a.rows() == 0 {
        return Err(Error::param("cannot sub-sample an empty matrix"));
    }
    let mut rng = seeded_rng(seed);
    let rows: Vec<usize> = (0..m).map(|_| rng.random_range(0..a.rows())).collect();
    let mut op = uniform_from_rows(a, &rows)?;
    op.seed = seed;
    Ok(op)
}

/// Column sub-sampling sketch selecting the given rows of `A`.
pub fn uniform_from_rows(a: &DenseMatrix, rows: &[usize]) -> Result<SketchOperator> {
    check_size(rows.len())?;
    if let Some(&bad) = rows.iter().find(|&&r| r >= a.rows()) {
        return Err(Error::param(format!("row index {bad} out of range for {} rows", a.rows())));
    }
    let mut stilde = Mat::zeros(a.rows(), rows.len());
    for (col, &r) in rows.iter().enumerate() {
        stilde[(r, col)] = 1.0;
    }
    SketchOperator::adaptive(SketchKind::UniformColumns, a, DenseMatrix::from_mat(stilde)?, 0, 0)
}
