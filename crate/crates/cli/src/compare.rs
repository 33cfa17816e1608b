//! Random-feature classification: sketched solves against the full problem.

use crate::config::{CompareConfig, SketchName};
use crate::data::{mix_seed, radial_classification, take_rows};
use crate::error::{CliError, Result};
use crate::sweep::make_sketch;
use asketch::kernel::RffMap;
use asketch::matrices::DenseMatrix;
use asketch::objectives::SmoothObjective;
use asketch::solver::{build_sketched, recover, solve_primal, solve_sketched, PrimalProblem, SolverOptions};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: SketchName,
    pub m: usize,
    pub test_error: f64,
    pub primal_test_error: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareTable {
    pub seed: u64,
    pub primal_test_error: f64,
    /// Ordered by method, then `m`.
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub fn get(&self, method: SketchName, m: usize) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.method == method && r.m == m)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,m,test_error,primal_test_error,converged\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:?},{:?},{}",
                r.method.as_str(),
                r.m,
                r.test_error,
                r.primal_test_error,
                r.converged
            );
        }
        out
    }
}

/// Fraction of rows where `1[⟨a_i, x⟩ > 0]` disagrees with the 0/1 label.
pub fn classification_error(a: &DenseMatrix, x: &[f64], labels: &[f64]) -> f64 {
    let scores = a.mul_vec(x);
    let wrong = scores
        .iter()
        .zip(labels)
        .filter(|(s, y)| (**s > 0.0) != (**y > 0.5))
        .count();
    wrong as f64 / labels.len() as f64
}

/// Logistic regression on random Fourier features of a radial two-class
/// problem; test error of each sketch family at each `m`.
pub fn run_baseline_comparison(config: &CompareConfig) -> Result<CompareTable> {
    config.validate()?;
    let (x, y) = radial_classification(config.samples, config.input_dim, mix_seed(&[config.seed, 10]))?;
    let map = RffMap::new(config.input_dim, config.features, config.gamma, mix_seed(&[config.seed, 11]))?;
    let features = map.apply(&x)?;
    let test_count = config.samples - config.train;
    let a_train = take_rows(&features, 0, config.train)?;
    let a_test = take_rows(&features, config.train, test_count)?;
    let (y_train, y_test) = (y[..config.train].to_vec(), &y[config.train..]);

    let problem = PrimalProblem::new(a_train, SmoothObjective::logistic(y_train)?, config.lambda)?;
    let oracle = solve_primal(&problem, &SolverOptions::newton())?;
    if !oracle.converged {
        return Err(CliError::NotConverged(format!(
            "primal solve stopped after {} iterations with gradient norm {:e}",
            oracle.iterations, oracle.final_gradient_norm
        )));
    }
    let primal_test_error = classification_error(&a_test, &oracle.solution, y_test);
    let mut rows = Vec::new();
    for (ki, &method) in config.methods.iter().enumerate() {
        for &m in &config.m_grid {
            let seed = mix_seed(&[config.seed, m as u64, ki as u64, 12]);
            let s = make_sketch(method, problem.a(), m, 1, None, seed)?;
            let sp = build_sketched(&problem, s)?;
            let report = solve_sketched(&sp, &SolverOptions::newton())?;
            let x = recover(&sp, &report)?;
            rows.push(CompareRow {
                method,
                m,
                test_error: classification_error(&a_test, &x, y_test),
                primal_test_error,
                converged: report.converged,
            });
        }
    }
    Ok(CompareTable {
        seed: config.seed,
        primal_test_error,
        rows,
    })
}
