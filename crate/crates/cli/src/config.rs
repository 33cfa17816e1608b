//! Experiment configuration. Every file is a single JSON document; fields
//! left out take the defaults below.

use crate::error::{CliError, Result};
use asketch::sketch::SketchKind;
use asketch::solver::{Method, SolverOptions};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveName {
    Logistic,
    Relu,
    Quadratic,
    Absolute,
}

impl ObjectiveName {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveName::Logistic => "logistic",
            ObjectiveName::Relu => "relu",
            ObjectiveName::Quadratic => "quadratic",
            ObjectiveName::Absolute => "absolute",
        }
    }
}

impl std::str::FromStr for ObjectiveName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(ObjectiveName::Logistic),
            "relu" => Ok(ObjectiveName::Relu),
            "quadratic" => Ok(ObjectiveName::Quadratic),
            "absolute" => Ok(ObjectiveName::Absolute),
            _ => Err(CliError::config(format!(
                "unknown objective {s:?}; expected logistic, relu, quadratic or absolute"
            ))),
        }
    }
}

/// How planted labels are derived from the scores `⟨a_i, x_gd⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelRule {
    /// `sign` for logistic, `relu` for the ReLU relaxation, `linear` otherwise.
    #[default]
    Auto,
    /// `(sign(s) + 1) / 2`
    Sign,
    /// `max(s, 0)`
    Relu,
    /// `s`
    Linear,
}

impl std::str::FromStr for LabelRule {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(LabelRule::Auto),
            "sign" => Ok(LabelRule::Sign),
            "relu" => Ok(LabelRule::Relu),
            "linear" => Ok(LabelRule::Linear),
            _ => Err(CliError::config(format!("unknown label rule {s:?}; expected auto, sign, relu or linear"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// Eigenvalues `scale² e^{−rate j}`; `scale` defaults to `√n`.
    Exponential { rate: f64, scale: Option<f64> },
    /// Singular values `scale j^{−exponent}`.
    Polynomial { exponent: f64, scale: Option<f64> },
    FiniteRank { rank: usize, scale: Option<f64> },
}

impl ProfileSpec {
    pub fn default_fit(&self) -> FitKind {
        match self {
            ProfileSpec::Polynomial { .. } => FitKind::LogLog,
            _ => FitKind::LogLinear,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MatrixSource {
    /// A fresh matrix per trial.
    Generate { n: usize, d: usize, profile: ProfileSpec },
    /// A fixed matrix; labels are planted per trial unless given.
    File { matrix: PathBuf, labels: Option<PathBuf> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSpec {
    pub source: MatrixSource,
    pub objective: ObjectiveName,
    pub labels: LabelRule,
    pub lambda: f64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            source: MatrixSource::Generate {
                n: 1000,
                d: 2000,
                profile: ProfileSpec::Exponential { rate: 0.1, scale: None },
            },
            objective: ObjectiveName::Logistic,
            labels: LabelRule::Auto,
            lambda: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchName {
    Adaptive,
    Oblivious,
    Leverage,
    Uniform,
    Power,
}

impl SketchName {
    pub fn kind(self) -> SketchKind {
        match self {
            SketchName::Adaptive => SketchKind::AdaptiveGaussian,
            SketchName::Oblivious => SketchKind::ObliviousGaussian,
            SketchName::Leverage => SketchKind::LeverageScore,
            SketchName::Uniform => SketchKind::UniformColumns,
            SketchName::Power => SketchKind::Power,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.kind().as_str()
    }
}

impl std::str::FromStr for SketchName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(SketchName::Adaptive),
            "oblivious" => Ok(SketchName::Oblivious),
            "leverage" => Ok(SketchName::Leverage),
            "uniform" => Ok(SketchName::Uniform),
            "power" => Ok(SketchName::Power),
            _ => Err(CliError::config(format!(
                "unknown sketch {s:?}; expected adaptive, oblivious, leverage, uniform or power"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SketchSpec {
    pub kinds: Vec<SketchName>,
    pub m_grid: Vec<usize>,
    /// Power iterations for the `power` sketch.
    pub power: usize,
    /// Target rank for leverage scores; defaults to `m` capped at the rank.
    pub target_rank: Option<usize>,
}

impl Default for SketchSpec {
    fn default() -> Self {
        Self {
            kinds: vec![SketchName::Adaptive, SketchName::Oblivious],
            m_grid: (3..=10).map(|k| 1usize << k).collect(),
            power: 1,
            target_rank: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub method: String,
    /// Sketched-solve tolerance. Stopping is relative to `1 + ‖α‖`, and the
    /// recovery multiplies the residual by roughly `‖A‖² / (nλ)`.
    pub tol: f64,
    pub max_iter: usize,
    pub step_size: Option<f64>,
    pub batch: Option<usize>,
    pub svrg_update_every: Option<usize>,
    /// Tolerance of the primal oracle solve.
    pub oracle_tol: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            method: "newton".into(),
            tol: 1e-12,
            max_iter: 200,
            step_size: None,
            batch: None,
            svrg_update_every: None,
            oracle_tol: 1e-12,
        }
    }
}

impl SolverSpec {
    pub fn options(&self, seed: u64) -> Result<SolverOptions> {
        let method: Method = self.method.parse()?;
        let mut opts = SolverOptions {
            method,
            tol: self.tol,
            max_iter: self.max_iter,
            step_size: self.step_size,
            seed,
            ..SolverOptions::default()
        };
        if let Some(b) = self.batch {
            opts.batch = b;
        }
        if let Some(u) = self.svrg_update_every {
            opts.svrg_update_every = u;
        }
        opts.validate()?;
        Ok(opts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    /// `log(error)` against `m`.
    LogLinear,
    /// `log(error)` against `log(m)`.
    LogLog,
}

impl FitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FitKind::LogLinear => "log-linear",
            FitKind::LogLog => "log-log",
        }
    }
}

impl std::str::FromStr for FitKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-linear" => Ok(FitKind::LogLinear),
            "log-log" => Ok(FitKind::LogLog),
            _ => Err(CliError::config(format!("unknown fit {s:?}; expected log-linear or log-log"))),
        }
    }
}

/// Which points enter the decay-slope fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSpec {
    /// Defaults to the profile's natural scale.
    pub kind: Option<FitKind>,
    /// Points whose mean error is at or below this are excluded.
    pub floor: f64,
    /// Exclude `m ≥ min(n, d)`, where the sketch spans the whole row space.
    pub below_rank: bool,
}

impl Default for FitSpec {
    fn default() -> Self {
        Self {
            kind: None,
            floor: 1e-9,
            below_rank: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub sketch: SketchSpec,
    pub solver: SolverSpec,
    pub fit: FitSpec,
    pub trials: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::default(),
            sketch: SketchSpec::default(),
            solver: SolverSpec::default(),
            fit: FitSpec::default(),
            trials: 10,
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// The two synthetic decay profiles of the sweep experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decay {
    /// Eigenvalues `n e^{−0.1 j}`.
    Exponential,
    /// Eigenvalues `n j^{−2}`.
    Polynomial,
}

impl std::str::FromStr for Decay {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" | "exponential" => Ok(Decay::Exponential),
            "poly" | "polynomial" => Ok(Decay::Polynomial),
            _ => Err(CliError::config(format!("unknown decay {s:?}; expected exp or poly"))),
        }
    }
}

impl ExperimentConfig {
    /// Sweep over `m ∈ {8, …, 1024}` at `n = 1000, d = 2000, λ = 1e-4`;
    /// `small` shrinks to `n = 200, d = 400` and `m ≤ 128`.
    pub fn sweep_preset(decay: Decay, objective: ObjectiveName, small: bool) -> Self {
        let (n, d) = if small { (200, 400) } else { (1000, 2000) };
        let profile = match decay {
            Decay::Exponential => ProfileSpec::Exponential { rate: 0.1, scale: None },
            Decay::Polynomial => ProfileSpec::Polynomial { exponent: 1.0, scale: None },
        };
        let mut config = Self::default();
        config.problem.source = MatrixSource::Generate { n, d, profile };
        config.problem.objective = objective;
        if small {
            config.sketch.m_grid = (3..=7).map(|k| 1usize << k).collect();
        }
        config
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: Self = serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        let grid = &self.sketch.m_grid;
        if grid.is_empty() || grid[0] == 0 {
            return Err(CliError::config("m_grid must be non-empty with positive entries"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::config("m_grid must be strictly increasing"));
        }
        if self.sketch.kinds.is_empty() {
            return Err(CliError::config("at least one sketch kind is required"));
        }
        if !(self.problem.lambda.is_finite() && self.problem.lambda > 0.0) {
            return Err(CliError::config(format!("lambda must be positive, got {}", self.problem.lambda)));
        }
        if !(self.solver.oracle_tol > 0.0) {
            return Err(CliError::config("oracle_tol must be positive"));
        }
        self.solver.options(0)?;
        if let MatrixSource::Generate { n, d, .. } = self.problem.source {
            if n == 0 || d == 0 {
                return Err(CliError::config("n and d must be positive"));
            }
        }
        Ok(())
    }

    pub fn fit_kind(&self) -> FitKind {
        self.fit.kind.unwrap_or(match &self.problem.source {
            MatrixSource::Generate { profile, .. } => profile.default_fit(),
            MatrixSource::File { .. } => FitKind::LogLinear,
        })
    }
}

/// Configuration of the random-feature classification comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub samples: usize,
    pub train: usize,
    pub input_dim: usize,
    /// Random features `D`.
    pub features: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub m_grid: Vec<usize>,
    pub methods: Vec<SketchName>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            train: 1500,
            input_dim: 5,
            features: 1000,
            gamma: 0.05,
            lambda: 1e-4,
            m_grid: vec![128],
            methods: vec![SketchName::Adaptive, SketchName::Oblivious, SketchName::Uniform],
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl CompareConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: Self = serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.train == 0 || self.train >= self.samples {
            return Err(CliError::config("train must lie strictly between 0 and samples"));
        }
        if self.features == 0 || self.input_dim == 0 {
            return Err(CliError::config("features and input_dim must be positive"));
        }
        if !(self.gamma > 0.0 && self.lambda > 0.0) {
            return Err(CliError::config("gamma and lambda must be positive"));
        }
        if self.m_grid.is_empty() || self.m_grid.contains(&0) || self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::config("m_grid must be non-empty, positive and strictly increasing"));
        }
        if self.methods.is_empty() {
            return Err(CliError::config("at least one method is required"));
        }
        Ok(())
    }
}
