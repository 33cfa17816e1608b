//! Relative-error sweeps over the sketch size.

use crate::config::{ExperimentConfig, FitKind, MatrixSource, SketchName};
use crate::data::{build_objective, mix_seed, planted_labels, synthetic_problem};
use crate::error::{CliError, Result};
use asketch::matrices::{load_matrix, numerical_rank, singular_values, DenseMatrix};
use asketch::sketch::{
    adaptive_gaussian, leverage_score_sampling, oblivious_gaussian, power_sketch, uniform_columns, SketchOperator,
};
use asketch::solver::{build_sketched, recover, solve_primal, solve_sketched, PrimalProblem, SolverOptions};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub m: usize,
    pub trial: usize,
    pub rel_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MStat {
    pub m: usize,
    pub mean: f64,
    pub std: f64,
}

/// Least-squares fit of mean log-error against `m` or `log m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub kind: FitKind,
    pub slope: f64,
    pub intercept: f64,
    /// Sketch sizes that entered the fit.
    pub used: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSweep {
    pub method: SketchName,
    /// Accepted points, ordered by `(m, trial)`.
    pub points: Vec<SweepPoint>,
    /// `(m, trial)` pairs whose sketched solve did not converge.
    pub flagged: Vec<(usize, usize)>,
    pub per_m: Vec<MStat>,
    pub fit: Option<SlopeFit>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub series: Vec<MethodSweep>,
}

impl SweepResult {
    pub fn series(&self, method: SketchName) -> Option<&MethodSweep> {
        self.series.iter().find(|s| s.method == method)
    }
}

/// Builds a sketch of the requested family. Leverage scores use
/// `target_rank`, defaulting to `min(m, rank A)`.
pub fn make_sketch(
    name: SketchName,
    a: &DenseMatrix,
    m: usize,
    power: usize,
    target_rank: Option<usize>,
    seed: u64,
) -> Result<SketchOperator> {
    Ok(match name {
        SketchName::Adaptive => adaptive_gaussian(a, m, seed)?,
        SketchName::Oblivious => oblivious_gaussian(a.cols(), m, seed)?,
        SketchName::Uniform => uniform_columns(a, m, seed)?,
        SketchName::Power => power_sketch(a, m, power, seed)?,
        SketchName::Leverage => {
            let k = match target_rank {
                Some(k) => k,
                None => m.min(numerical_rank(&singular_values(a)?, a.rows(), a.cols())).max(1),
            };
            leverage_score_sampling(a, m, k, seed)?
        }
    })
}

/// Per-`m` mean and population standard deviation of the accepted points.
pub fn aggregate(points: &[SweepPoint]) -> Vec<MStat> {
    let mut ms: Vec<usize> = points.iter().map(|p| p.m).collect();
    ms.sort_unstable();
    ms.dedup();
    ms.into_iter()
        .map(|m| {
            let v: Vec<f64> = points.iter().filter(|p| p.m == m).map(|p| p.rel_error).collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / v.len() as f64;
            MStat { m, mean, std: var.sqrt() }
        })
        .collect()
}

/// Fits `mean_t log(err)` against `m` (log-linear) or `log m` (log-log),
/// skipping sizes at or above `max_m` and sizes with a zero error or a mean
/// error at or below `floor`.
pub fn fit_slope(points: &[SweepPoint], kind: FitKind, floor: f64, max_m: Option<usize>) -> Option<SlopeFit> {
    let stats = aggregate(points);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    for s in &stats {
        if max_m.is_some_and(|cap| s.m >= cap) || s.mean <= floor {
            continue;
        }
        let errs: Vec<f64> = points.iter().filter(|p| p.m == s.m).map(|p| p.rel_error).collect();
        if errs.iter().any(|&e| e <= 0.0) {
            continue;
        }
        let log_mean = errs.iter().map(|e| e.ln()).sum::<f64>() / errs.len() as f64;
        xs.push(match kind {
            FitKind::LogLinear => s.m as f64,
            FitKind::LogLog => (s.m as f64).ln(),
        });
        ys.push(log_mean);
        used.push(s.m);
    }
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Some(SlopeFit {
        kind,
        slope,
        intercept: my - slope * mx,
        used,
    })
}

struct TrialOutcome {
    /// Indexed like `config.sketch.kinds`; entries are `(m, error or None if flagged)`.
    per_method: Vec<Vec<(usize, Option<f64>)>>,
}

fn trial_data(config: &ExperimentConfig, trial: usize, fixed: Option<&(DenseMatrix, Option<Vec<f64>>)>) -> Result<(DenseMatrix, Vec<f64>)> {
    let p = &config.problem;
    let seed = mix_seed(&[config.seed, trial as u64]);
    match (&p.source, fixed) {
        (MatrixSource::Generate { n, d, profile }, _) => synthetic_problem(*n, *d, profile, p.objective, p.labels, seed),
        (MatrixSource::File { .. }, Some((a, labels))) => {
            let y = match labels {
                Some(y) => y.clone(),
                None => planted_labels(a, p.objective, p.labels, mix_seed(&[seed, 2])),
            };
            Ok((a.clone(), y))
        }
        (MatrixSource::File { .. }, None) => Err(CliError::config("matrix file not loaded")),
    }
}

fn run_trial(
    config: &ExperimentConfig,
    trial: usize,
    fixed: Option<&(DenseMatrix, Option<Vec<f64>>)>,
    opts: &SolverOptions,
) -> Result<TrialOutcome> {
    let (a, labels) = trial_data(config, trial, fixed)?;
    let objective = build_objective(config.problem.objective, labels)?;
    let problem = PrimalProblem::new(a, objective, config.problem.lambda)?;
    let oracle_opts = SolverOptions::newton()
        .with_tol(config.solver.oracle_tol)
        .with_max_iter(config.solver.max_iter.max(200));
    let oracle = solve_primal(&problem, &oracle_opts)?;
    if !oracle.converged {
        return Err(CliError::NotConverged(format!(
            "oracle solve for trial {trial} stopped after {} iterations with gradient norm {:e} (tol {:e})",
            oracle.iterations, oracle.final_gradient_norm, config.solver.oracle_tol
        )));
    }
    let xstar = &oracle.solution;
    let norm_star = xstar.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_star == 0.0 {
        return Err(CliError::config(format!("trial {trial}: the solution is zero, relative error undefined")));
    }
    let mut per_method = Vec::with_capacity(config.sketch.kinds.len());
    for (ki, &kind) in config.sketch.kinds.iter().enumerate() {
        let mut rows = Vec::with_capacity(config.sketch.m_grid.len());
        for &m in &config.sketch.m_grid {
            let seed = mix_seed(&[config.seed, trial as u64, m as u64, ki as u64, 3]);
            let s = make_sketch(kind, problem.a(), m, config.sketch.power, config.sketch.target_rank, seed)?;
            let sp = build_sketched(&problem, s)?;
            let report = solve_sketched(&sp, &opts.clone().with_seed(seed))?;
            if !report.converged {
                rows.push((m, None));
                continue;
            }
            let x = recover(&sp, &report)?;
            let err = x.iter().zip(xstar).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt() / norm_star;
            rows.push((m, Some(err)));
        }
        per_method.push(rows);
    }
    Ok(TrialOutcome { per_method })
}

/// Runs every trial (in parallel) and aggregates per sketch family.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let opts = config.solver.options(config.seed)?;
    let fixed = match &config.problem.source {
        MatrixSource::File { matrix, labels } => {
            let a = load_matrix(matrix)?;
            let y = match labels {
                Some(path) => Some(load_matrix(path)?.column(0)),
                None => None,
            };
            Some((a, y))
        }
        MatrixSource::Generate { .. } => None,
    };
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t, fixed.as_ref(), &opts))
        .collect::<Result<_>>()?;
    let cap = match (&config.problem.source, config.fit.below_rank) {
        (MatrixSource::Generate { n, d, .. }, true) => Some((*n).min(*d)),
        (MatrixSource::File { .. }, true) => fixed.as_ref().map(|(a, _)| a.rows().min(a.cols())),
        (_, false) => None,
    };
    let kind = config.fit_kind();
    let series = config
        .sketch
        .kinds
        .iter()
        .enumerate()
        .map(|(ki, &method)| {
            let mut points = Vec::new();
            let mut flagged = Vec::new();
            for (mi, &m) in config.sketch.m_grid.iter().enumerate() {
                for (trial, outcome) in outcomes.iter().enumerate() {
                    match outcome.per_method[ki][mi].1 {
                        Some(rel_error) => points.push(SweepPoint { m, trial, rel_error }),
                        None => flagged.push((m, trial)),
                    }
                }
            }
            let per_m = aggregate(&points);
            let fit = fit_slope(&points, kind, config.fit.floor, cap);
            MethodSweep {
                method,
                points,
                flagged,
                per_m,
                fit,
            }
        })
        .collect();
    Ok(SweepResult {
        config: config.clone(),
        series,
    })
}
