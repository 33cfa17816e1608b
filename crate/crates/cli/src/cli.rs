//! Argument parsing and subcommand dispatch.
//!
//! Each subcommand accepts `--config FILE`, a JSON document whose keys
//! mirror the long flags in snake case; flags override file values.

use crate::compare::run_baseline_comparison;
use crate::config::{
    CompareConfig, Decay, ExperimentConfig, FitKind, LabelRule, ObjectiveName, ProfileSpec, SketchName, SolverSpec,
};
use crate::data::{build_objective, synthetic_problem};
use crate::error::{CliError, Result};
use crate::report::{emit_report, emit_series, load_sweep_csv, series_from_points, ReportFormat};
use crate::sweep::{make_sketch, run_sweep};
use asketch::bounds::{predict_dimensions, Regime, RegimeKind};
use asketch::kernel::{gaussian_kernel, kernel_objective, solve_kernel_primal, solve_kernel_sketched, KernelMatrix};
use asketch::matrices::{load_matrix, save_matrix, DenseMatrix, MatrixFormat};
use asketch::refine::{inner_options, iterative_solve_tracked};
use asketch::solver::{build_sketched, recover, solve_primal, solve_sketched, PrimalProblem, SolveReport, SolverOptions};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "asketch", version, about = "Ridge-regularized convex programs solved in adaptive random subspaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a matrix with a prescribed spectrum and planted labels.
    Gen(GenArgs),
    /// Solve the full program.
    Solve(SolveArgs),
    /// Solve in a sketched subspace and recover a full solution.
    SketchSolve(SketchSolveArgs),
    /// Iterative refinement in a sketched subspace.
    Iterate(IterateArgs),
    /// Relative error against sketch size.
    Sweep(SweepArgs),
    /// Random-feature classification with sketched solves.
    Compare(CompareArgs),
    /// Predicted sketch sizes per spectral regime.
    Predict(PredictArgs),
    /// Solve a kernel program, optionally sketched.
    KernelSolve(KernelArgs),
    /// Rebuild JSON/SVG reports from sweep CSV files.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemArgs {
    /// Data matrix (CSV, or the binary format).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Labels, one per row.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// logistic, relu, quadratic or absolute.
    #[arg(long)]
    pub objective: Option<ObjectiveName>,
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverArgs {
    /// gd, newton, sgd, svrg or subgradient.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub svrg_update_every: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SolverArgs {
    fn options(&self, defaults: SolverOptions) -> Result<SolverOptions> {
        let mut o = defaults;
        if let Some(m) = &self.method {
            o.method = m.parse()?;
            if o.method == asketch::solver::Method::Gd && self.max_iter.is_none() {
                o.max_iter = SolverOptions::gd().max_iter;
            }
        }
        if let Some(t) = self.tol {
            o.tol = t;
        }
        if let Some(n) = self.max_iter {
            o.max_iter = n;
        }
        if self.step.is_some() {
            o.step_size = self.step;
        }
        if let Some(b) = self.batch {
            o.batch = b;
        }
        if let Some(u) = self.svrg_update_every {
            o.svrg_update_every = u;
        }
        if let Some(s) = self.seed {
            o.seed = s;
        }
        o.validate()?;
        Ok(o)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SketchArgs {
    /// adaptive, oblivious, leverage, uniform or power.
    #[arg(long)]
    pub sketch: Option<SketchName>,
    /// Sketch size.
    #[arg(long)]
    pub m: Option<usize>,
    /// Power iterations for the power sketch.
    #[arg(long)]
    pub power: Option<usize>,
    /// Target rank for leverage-score sampling.
    #[arg(long)]
    pub target_rank: Option<usize>,
    #[arg(long)]
    pub sketch_seed: Option<u64>,
}

impl SketchArgs {
    fn build(&self, a: &DenseMatrix) -> Result<asketch::sketch::SketchOperator> {
        let m = self.m.ok_or_else(|| CliError::config("--m is required"))?;
        let kind = self.sketch.unwrap_or(SketchName::Adaptive);
        make_sketch(kind, a, m, self.power.unwrap_or(1), self.target_rank, self.sketch_seed.unwrap_or(0))
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// exp, poly or rank.
    #[arg(long)]
    pub profile: Option<String>,
    /// Eigenvalue decay rate for `exp`.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Singular-value exponent for `poly`.
    #[arg(long)]
    pub exponent: Option<f64>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Leading singular value; defaults to `√n`.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub objective: Option<ObjectiveName>,
    /// auto, sign, relu or linear.
    #[arg(long)]
    pub label_rule: Option<LabelRule>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path of the matrix; `.csv` selects CSV, anything else binary.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SketchSolveArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub sketch: SketchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub sketch: SketchArgs,
    /// Number of refinement steps.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Full experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in setup used when no config is given: exp or poly.
    #[arg(long)]
    pub preset: Option<Decay>,
    /// Shrink the preset to n = 200, d = 400.
    #[arg(long)]
    pub small: bool,
    #[arg(long)]
    pub objective: Option<ObjectiveName>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<SketchName>>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub fit: Option<FitKind>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Any of csv, json, svg.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<ReportFormat>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub train: Option<usize>,
    #[arg(long)]
    pub input_dim: Option<usize>,
    #[arg(long)]
    pub features: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<SketchName>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// rank, exp or poly.
    #[arg(long)]
    pub regime: Option<String>,
    /// Rank `ρ`, eigenvalue rate `κ`, or exponent `β`.
    #[arg(long)]
    pub param: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Precomputed kernel matrix.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
    /// Feature matrix `A`; the kernel is `AAᵀ`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Raw inputs for a Gaussian kernel with `--gamma`.
    #[arg(long)]
    pub inputs: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub objective: Option<ObjectiveName>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Sketch size; omit to solve the full kernel program.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub sketch_seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Sweep CSV files named `sweep_<method>.csv`.
    #[arg(long, value_delimiter = ',')]
    pub inputs: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub fit: Option<FitKind>,
    /// Mean errors at or below this are left out of the fit.
    #[arg(long)]
    pub floor: Option<f64>,
    /// Sizes at or above this are left out of the fit.
    #[arg(long)]
    pub max_m: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<ReportFormat>>,
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                if v.is_null() {
                    continue;
                }
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) if !o.is_null() => *b = o,
        _ => {}
    }
}

/// File values overlaid with explicitly given flags.
fn layered<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags).expect("flags serialize")).expect("flags round-trip"));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut base: Value = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    merge(&mut base, serde_json::to_value(flags).expect("flags serialize"));
    serde_json::from_value(base).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn load_vector(path: &Path) -> Result<Vec<f64>> {
    let m = load_matrix(path)?;
    match m.shape() {
        (_, 1) => Ok(m.column(0)),
        (1, _) => Ok(m.row(0)),
        (r, c) => Err(CliError::config(format!("{}: expected a vector, got a {r}x{c} matrix", path.display()))),
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, body).map_err(|e| CliError::io(path, e))
}

fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    save_matrix(&DenseMatrix::column_vector(v)?, path, MatrixFormat::from_path(path))?;
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn load_problem(p: &ProblemArgs) -> Result<PrimalProblem> {
    let matrix = p.matrix.as_deref().ok_or_else(|| CliError::config("--matrix is required"))?;
    let labels = p.labels.as_deref().ok_or_else(|| CliError::config("--labels is required"))?;
    let a = load_matrix(matrix)?;
    let y = load_vector(labels)?;
    let objective = build_objective(p.objective.unwrap_or(ObjectiveName::Logistic), y)?;
    Ok(PrimalProblem::new(a, objective, p.lambda.unwrap_or(1e-4))?)
}

fn check_converged(report: &SolveReport, what: &str) -> Result<()> {
    if report.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "{what}: {} iterations, gradient norm {:e}",
            report.iterations, report.final_gradient_norm
        )))
    }
}

fn solve_summary(solution_path: &Path, report: &SolveReport, objective: f64, grad_norm: f64) -> Value {
    json!({
        "solution_path": solution_path.display().to_string(),
        "iterations": report.iterations,
        "grad_norm": grad_norm,
        "objective": objective,
        "wall_time_s": report.wall_time,
        "converged": report.converged,
    })
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let a = layered(args, args.config.as_deref())?;
    let n = a.n.ok_or_else(|| CliError::config("--n is required"))?;
    let d = a.d.ok_or_else(|| CliError::config("--d is required"))?;
    let profile = match a.profile.as_deref().unwrap_or("exp") {
        "exp" | "exponential" => ProfileSpec::Exponential {
            rate: a.rate.unwrap_or(0.1),
            scale: a.scale,
        },
        "poly" | "polynomial" => ProfileSpec::Polynomial {
            exponent: a.exponent.unwrap_or(1.0),
            scale: a.scale,
        },
        "rank" | "finite-rank" => ProfileSpec::FiniteRank {
            rank: a.rank.ok_or_else(|| CliError::config("--rank is required for the rank profile"))?,
            scale: a.scale,
        },
        other => return Err(CliError::config(format!("unknown profile {other:?}; expected exp, poly or rank"))),
    };
    let (m, y) = synthetic_problem(
        n,
        d,
        &profile,
        a.objective.unwrap_or(ObjectiveName::Logistic),
        a.label_rule.unwrap_or_default(),
        a.seed.unwrap_or(0),
    )?;
    let matrix_out = a.matrix_out.unwrap_or_else(|| PathBuf::from("A.csv"));
    let labels_out = a.labels_out.unwrap_or_else(|| PathBuf::from("y.csv"));
    if let Some(parent) = matrix_out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    save_matrix(&m, &matrix_out, MatrixFormat::from_path(&matrix_out))?;
    write_vector(&labels_out, &y)?;
    println!("wrote {} ({n}x{d}) and {}", matrix_out.display(), labels_out.display());
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let a = layered(args, args.config.as_deref())?;
    let problem = load_problem(&a.problem)?;
    let opts = a.solver.options(SolverOptions::default())?;
    let report = solve_primal(&problem, &opts)?;
    let out = a.out.unwrap_or_else(|| PathBuf::from("out"));
    let solution_path = out.join("solution.csv");
    write_vector(&solution_path, &report.solution)?;
    let summary = solve_summary(&solution_path, &report, report.objective_value, report.final_gradient_norm);
    write_file(&out.join("solve.json"), &pretty(&summary))?;
    print!("{}", pretty(&summary));
    check_converged(&report, "solve")
}

fn cmd_sketch_solve(args: &SketchSolveArgs) -> Result<()> {
    let a = layered(args, args.config.as_deref())?;
    let problem = load_problem(&a.problem)?;
    let opts = a.solver.options(SolverOptions::default())?;
    let sp = build_sketched(&problem, a.sketch.build(problem.a())?)?;
    let report = solve_sketched(&sp, &opts)?;
    let x = recover(&sp, &report)?;
    let out = a.out.unwrap_or_else(|| PathBuf::from("out"));
    let solution_path = out.join("solution.csv");
    write_vector(&solution_path, &x)?;
    let mut summary = solve_summary(&solution_path, &report, problem.value(&x), problem.gradient_norm(&x));
    summary["sketched_objective"] = json!(report.objective_value);
    summary["sketched_grad_norm"] = json!(report.final_gradient_norm);
    summary["sketch"] = json!(sp.sketch().kind().as_str());
    summary["m"] = json!(sp.sketch_size());
    summary["rank"] = json!(sp.rank());
    write_file(&out.join("sketch_solve.json"), &pretty(&summary))?;
    print!("{}", pretty(&summary));
    check_converged(&report, "sketched solve")
}

fn cmd_iterate(args: &IterateArgs) -> Result<()> {
    let a = layered(args, args.config.as_deref())?;
    let t = a.t.ok_or_else(|| CliError::config("--T is required"))?;
    let problem = load_problem(&a.problem)?;
    let opts = a.solver.options(inner_options())?;
    let reference = solve_primal(&problem, &SolverOptions::newton().with_tol(1e-12))?;
    check_converged(&reference, "reference solve")?;
    let sp = build_sketched(&problem, a.sketch.build(problem.a())?)?;
    let outcome = iterative_solve_tracked(&sp, t, &opts, Some(&reference.solution))?;
    let out = a.out.unwrap_or_else(|| PathBuf::from("out"));
    let mut csv = String::from("t,error,objective\n");
    for r in &outcome.history {
        csv.push_str(&format!("{},{:?},{:?}\n", r.t, r.error.unwrap_or(f64::NAN), r.objective));
    }
    let history_path = out.join("history.csv");
    write_file(&history_path, &csv)?;
    let solution_path = out.join("solution.csv");
    write_vector(&solution_path, &outcome.report.solution)?;
    let x = &outcome.report.solution;
    let mut summary = solve_summary(&solution_path, &outcome.report, problem.value(x), problem.gradient_norm(x));
    summary["history_path"] = json!(history_path.display().to_string());
    summary["steps"] = json!(outcome.history.len());
    write_file(&out.join("iterate.json"), &pretty(&summary))?;
    print!("{}", pretty(&summary));
    check_converged(&outcome.report, "refinement")
}

fn sweep_config(args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut c = match (&args.config, args.preset) {
        (Some(_), Some(_)) => return Err(CliError::config("--config and --preset are mutually exclusive")),
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, preset) => ExperimentConfig::sweep_preset(
            preset.unwrap_or(Decay::Exponential),
            args.objective.unwrap_or(ObjectiveName::Logistic),
            args.small,
        ),
    };
    if args.config.is_some() && args.small {
        return Err(CliError::config("--small applies to presets only"));
    }
    if let Some(o) = args.objective {
        c.problem.objective = o;
    }
    if let Some(l) = args.lambda {
        c.problem.lambda = l;
    }
    if let Some(t) = args.trials {
        c.trials = t;
    }
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(g) = &args.m_grid {
        c.sketch.m_grid = g.clone();
    }
    if let Some(k) = &args.kinds {
        c.sketch.kinds = k.clone();
    }
    if let Some(m) = &args.method {
        c.solver = SolverSpec {
            method: m.clone(),
            ..c.solver
        };
    }
    if args.fit.is_some() {
        c.fit.kind = args.fit;
    }
    if let Some(o) = &args.out {
        c.output_dir = o.clone();
    }
    c.validate()?;
    Ok(c)
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let config = sweep_config(args)?;
    let result = run_sweep(&config)?;
    let formats = args.format.clone().unwrap_or_else(|| ReportFormat::ALL.to_vec());
    let files = emit_report(&result, &formats, &config.output_dir)?;
    for s in &result.series {
        let slope = s.fit.as_ref().map_or("n/a".to_string(), |f| format!("{:.4} ({})", f.slope, f.kind.as_str()));
        println!(
            "{:<10} slope {slope}  flagged {}  mean errors {}",
            s.method.as_str(),
            s.flagged.len(),
            s.per_m
                .iter()
                .map(|p| format!("{}:{:.3e}", p.m, p.mean))
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let mut c = match &args.config {
        Some(path) => CompareConfig::load(path)?,
        None => CompareConfig::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => {$(if let Some(v) = args.$f.clone() { c.$f = v; })*};
    }
    set!(seed, samples, train, input_dim, features, gamma, lambda, m_grid, methods);
    if let Some(o) = &args.out {
        c.output_dir = o.clone();
    }
    c.validate()?;
    let table = run_baseline_comparison(&c)?;
    let path = c.output_dir.join("compare.csv");
    write_file(&path, &table.to_csv())?;
    print!("{}", table.to_csv());
    println!("wrote {}", path.display());
    match table.rows.iter().find(|r| !r.converged) {
        Some(r) => Err(CliError::NotConverged(format!("sketched solve for {} at m = {}", r.method.as_str(), r.m))),
        None => Ok(()),
    }
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let a = layered(args, args.config.as_deref())?;
    let kind: RegimeKind = a.regime.as_deref().unwrap_or("rank").parse()?;
    let param = a.param.ok_or_else(|| CliError::config("--param is required"))?;
    let regime = match kind {
        RegimeKind::Rank => {
            if !(param >= 1.0 && param.fract() == 0.0) {
                return Err(CliError::config(format!("rank must be a positive integer, got {param}")));
            }
            Regime::FiniteRank { rho: param as usize }
        }
        RegimeKind::Exp => Regime::Exponential { kappa: param },
        RegimeKind::Poly => Regime::Polynomial { beta: param },
    };
    let p = predict_dimensions(
        regime,
        a.eps.unwrap_or(0.1),
        a.eta.unwrap_or(0.01),
        a.lambda.unwrap_or(1e-4),
        a.d.unwrap_or(2000),
    )?;
    let v = json!({
        "regime": regime.name(),
        "param": param,
        "eps": p.eps,
        "eta": p.eta,
        "lambda": p.lambda,
        "d": p.d,
        "m_adaptive": p.m_adaptive,
        "m_oblivious": p.m_oblivious,
        "m_leverage": p.m_leverage,
        "oblivious_ratio": p.oblivious_ratio,
        "leverage_ratio": p.leverage_ratio,
    });
    print!("{}", pretty(&v));
    Ok(())
}

fn cmd_kernel(args: &KernelArgs) -> Result<()> {
    let a = layered(args, args.config.as_deref())?;
    let k = match (&a.kernel, &a.features, &a.inputs) {
        (Some(p), None, None) => KernelMatrix::new(load_matrix(p)?)?,
        (None, Some(p), None) => KernelMatrix::from_features(&load_matrix(p)?)?,
        (None, None, Some(p)) => {
            let gamma = a.gamma.ok_or_else(|| CliError::config("--gamma is required with --inputs"))?;
            gaussian_kernel(&load_matrix(p)?, gamma)?
        }
        _ => return Err(CliError::config("give exactly one of --kernel, --features or --inputs")),
    };
    let labels = a.labels.as_deref().ok_or_else(|| CliError::config("--labels is required"))?;
    let objective = build_objective(a.objective.unwrap_or(ObjectiveName::Logistic), load_vector(labels)?)?;
    let lambda = a.lambda.unwrap_or(1e-4);
    let opts = a.solver.options(SolverOptions::default())?;
    let (w, report, rank) = match a.m {
        Some(m) => {
            let s = solve_kernel_sketched(&k, objective.clone(), lambda, m, a.sketch_seed.unwrap_or(0), &opts)?;
            (s.w, s.report, Some(s.rank))
        }
        None => {
            let s = solve_kernel_primal(&k, objective.clone(), lambda, &opts)?;
            (s.w, s.report, None)
        }
    };
    let out = a.out.unwrap_or_else(|| PathBuf::from("out"));
    let solution_path = out.join("w.csv");
    write_vector(&solution_path, &w)?;
    let mut summary = solve_summary(
        &solution_path,
        &report,
        kernel_objective(&k, &objective, lambda, &w),
        report.final_gradient_norm,
    );
    summary["m"] = json!(a.m);
    summary["rank"] = json!(rank);
    write_file(&out.join("kernel_solve.json"), &pretty(&summary))?;
    print!("{}", pretty(&summary));
    check_converged(&report, "kernel solve")
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let a = layered(args, args.config.as_deref())?;
    let inputs = a.inputs.unwrap_or_default();
    if inputs.is_empty() {
        return Err(CliError::config("--inputs needs at least one sweep CSV"));
    }
    let kind = a.fit.unwrap_or(FitKind::LogLinear);
    let mut series = Vec::new();
    for path in &inputs {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let name = stem.strip_prefix("sweep_").unwrap_or(stem);
        let method: SketchName = name.parse().map_err(|_| {
            CliError::config(format!("{}: file name must be sweep_<method>.csv", path.display()))
        })?;
        let points = load_sweep_csv(path)?;
        series.push(series_from_points(method, points, kind, a.floor.unwrap_or(0.0), a.max_m));
    }
    let formats = a.format.unwrap_or_else(|| vec![ReportFormat::Json, ReportFormat::Svg]);
    let out = a.out.unwrap_or_else(|| PathBuf::from("out"));
    for f in emit_series(&series, None, &formats, &out)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::SketchSolve(a) => cmd_sketch_solve(a),
        Command::Iterate(a) => cmd_iterate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Predict(a) => cmd_predict(a),
        Command::KernelSolve(a) => cmd_kernel(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Sizes the global thread pool from `ASKETCH_THREADS` when set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ASKETCH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("ASKETCH_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot size the thread pool: {e}")))
}
