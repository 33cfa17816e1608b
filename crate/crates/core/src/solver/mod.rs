//! Primal and sketched ridge programs.
//!
//! The primal is `min_x f(Ax) + (λ/2)‖x‖²`. Given a sketch `S ∈ ℝ^{d×m}`
//! the rescaled sketched program is
//!
//! ```text
//! min_α f(A_{S,†} α) + (λ/2)‖α‖²,   A_{S,†} = A S R,   R = (SᵀS)^{-1/2}
//! ```
//!
//! and the primal estimate is recovered from its dual certificate as
//! `x̃ = −λ⁻¹ Aᵀ ∇f(A_{S,†} α*)`.

mod program;

pub(crate) use program::RidgeProgram;

use crate::error::{Error, Result};
use crate::matrices::{mat_vec, rank_tolerance, singular_values, DenseMatrix};
use crate::objectives::Objective;
use crate::sketch::SketchOperator;
use faer::{Mat, Side};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Gd,
    Newton,
    Sgd,
    Svrg,
    Subgradient,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Gd, Method::Newton, Method::Sgd, Method::Svrg, Method::Subgradient];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Gd => "gd",
            Method::Newton => "newton",
            Method::Sgd => "sgd",
            Method::Svrg => "svrg",
            Method::Subgradient => "subgradient",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown method {s:?}")))
    }
}

/// Step-size rule of the subgradient method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepSchedule {
    /// `c / √t`
    InverseSqrt,
    /// `c / (λ t)`
    StronglyConvex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub method: Method,
    /// Gradient-norm tolerance, relative to `1 + ‖x‖₂`. For the subgradient
    /// method, the allowed best-value change over the last tenth of the run.
    pub tol: f64,
    pub max_iter: usize,
    /// `None` picks `1/L` for gradient descent and `1.0` for subgradient.
    pub step_size: Option<f64>,
    pub batch: usize,
    pub svrg_update_every: usize,
    pub newton_damped_iters: usize,
    pub newton_damped_step: f64,
    pub schedule: StepSchedule,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: Method::Newton,
            tol: 1e-10,
            max_iter: 200,
            step_size: None,
            batch: 128,
            svrg_update_every: 400,
            newton_damped_iters: 5,
            newton_damped_step: 0.2,
            schedule: StepSchedule::InverseSqrt,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn newton() -> Self {
        Self::default()
    }

    pub fn gd() -> Self {
        Self {
            method: Method::Gd,
            max_iter: 100_000,
            ..Self::default()
        }
    }

    pub fn sgd(step: f64) -> Self {
        Self {
            method: Method::Sgd,
            step_size: Some(step),
            max_iter: 100_000,
            ..Self::default()
        }
    }

    pub fn svrg(step: f64) -> Self {
        Self {
            method: Method::Svrg,
            step_size: Some(step),
            max_iter: 100_000,
            ..Self::default()
        }
    }

    /// SVRG with the smaller batch and update period used on sketched programs.
    pub fn sketched_svrg(step: f64) -> Self {
        Self {
            batch: 64,
            svrg_update_every: 200,
            ..Self::svrg(step)
        }
    }

    pub fn subgradient(iterations: usize) -> Self {
        Self {
            method: Method::Subgradient,
            max_iter: iterations,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step_size = Some(step);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: StepSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::param(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be at least 1"));
        }
        if let Some(s) = self.step_size {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::param(format!("step size must be positive, got {s}")));
            }
        }
        if self.batch == 0 || self.svrg_update_every == 0 {
            return Err(Error::param("batch and svrg_update_every must be at least 1"));
        }
        if !(self.newton_damped_step > 0.0 && self.newton_damped_step <= 1.0) {
            return Err(Error::param("newton_damped_step must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    /// `∇f` (or a subgradient) at the fitted scores.
    pub dual_certificate: Vec<f64>,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub objective_value: f64,
    /// Seconds.
    pub wall_time: f64,
    pub converged: bool,
    pub method: Method,
    /// Objective values along the run (per iteration for full-batch methods).
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PrimalProblem {
    a: DenseMatrix,
    objective: Objective,
    lambda: f64,
}

impl PrimalProblem {
    pub fn new(a: DenseMatrix, objective: impl Into<Objective>, lambda: f64) -> Result<Self> {
        let objective = objective.into();
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::param(format!("lambda must be positive, got {lambda}")));
        }
        if objective.dim() != a.rows() {
            return Err(Error::param(format!(
                "objective has {} labels but A has {} rows",
                objective.dim(),
                a.rows()
            )));
        }
        Ok(Self { a, objective, lambda })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub(crate) fn program(&self) -> RidgeProgram<'_> {
        RidgeProgram::new(self.a.as_ref(), self.lambda, &self.objective)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.program().value(x)
    }

    /// `‖Aᵀ∇f(Ax) + λx‖₂`.
    pub fn gradient_norm(&self, x: &[f64]) -> f64 {
        crate::matrices::norm2(&self.program().gradient(x).0)
    }

    /// `−λ⁻¹ Aᵀ z`.
    pub fn primal_from_dual(&self, z: &[f64]) -> Vec<f64> {
        self.a.tr_mul_vec(z).into_iter().map(|v| -v / self.lambda).collect()
    }
}

pub fn solve_primal(p: &PrimalProblem, opts: &SolverOptions) -> Result<SolveReport> {
    p.program().solve(opts, None)
}

#[derive(Clone, Debug)]
pub struct SketchedProblem<'p> {
    parent: &'p PrimalProblem,
    sketch: SketchOperator,
    rescaler: DenseMatrix,
    isometry: DenseMatrix,
    a_s_dagger: DenseMatrix,
    rank: usize,
}

impl<'p> SketchedProblem<'p> {
    pub fn parent(&self) -> &'p PrimalProblem {
        self.parent
    }

    pub fn sketch(&self) -> &SketchOperator {
        &self.sketch
    }

    /// `R`, the pseudo-inverse square root of `SᵀS`.
    pub fn rescaler(&self) -> &DenseMatrix {
        &self.rescaler
    }

    /// `S R`; orthonormal on the row space of `S`.
    pub fn isometry(&self) -> &DenseMatrix {
        &self.isometry
    }

    pub fn a_s_dagger(&self) -> &DenseMatrix {
        &self.a_s_dagger
    }

    /// Numerical rank of `S`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sketch_size(&self) -> usize {
        self.rescaler.rows()
    }

    /// `R Sᵀ x`.
    pub fn reduce(&self, x: &[f64]) -> Vec<f64> {
        self.isometry.tr_mul_vec(x)
    }

    /// `S R α`, the primal-space point represented by `α`.
    pub fn lift(&self, alpha: &[f64]) -> Vec<f64> {
        self.isometry.mul_vec(alpha)
    }

    pub(crate) fn program(&self) -> RidgeProgram<'_> {
        RidgeProgram::new(self.a_s_dagger.as_ref(), self.parent.lambda, &self.parent.objective)
    }

    /// Value of the rescaled sketched objective at `α`.
    pub fn value(&self, alpha: &[f64]) -> f64 {
        self.program().value(alpha)
    }
}

/// Builds `R` and `A_{S,†}`.
///
/// `R` is formed from the thin SVD `S = U Σ Vᵀ` as `V Σ⁺ Vᵀ`, which equals
/// the eigen-based `(SᵀS)^{-1/2}` without squaring the condition number.
pub fn build_sketched<'p>(p: &'p PrimalProblem, s: SketchOperator) -> Result<SketchedProblem<'p>> {
    let smat = s.matrix();
    if smat.rows() != p.dim() {
        return Err(Error::param(format!(
            "sketch has {} rows but the problem has dimension {}",
            smat.rows(),
            p.dim()
        )));
    }
    let (d, m) = smat.shape();
    let (left, sing, right) = if m == 0 || d == 0 {
        (Mat::zeros(d, 0), Vec::new(), Mat::zeros(m, 0))
    } else if d >= m {
        let dec = smat
            .mat()
            .thin_svd()
            .map_err(|e| Error::Numerical(format!("SVD of the sketch failed: {e:?}")))?;
        let sv: Vec<f64> = dec.S().column_vector().iter().copied().collect();
        (dec.U().to_owned(), sv, dec.V().to_owned())
    } else {
        // S is wide: decompose Sᵀ instead and swap the factors.
        let dec = smat
            .mat()
            .transpose()
            .thin_svd()
            .map_err(|e| Error::Numerical(format!("SVD of the sketch failed: {e:?}")))?;
        let sv: Vec<f64> = dec.S().column_vector().iter().copied().collect();
        (dec.V().to_owned(), sv, dec.U().to_owned())
    };
    let smax = sing.first().copied().unwrap_or(0.0);
    let tol = rank_tolerance(d, m, smax);
    let rank = sing.iter().take_while(|&&v| v > tol && v > 0.0).count();
    let u_r = left.subcols(0, rank);
    let v_r = right.subcols(0, rank);
    let scaled_v = Mat::from_fn(m, rank, |i, j| v_r[(i, j)] / sing[j]);
    let rescaler: Mat<f64> = &scaled_v * v_r.transpose();
    let isometry: Mat<f64> = u_r * v_r.transpose();
    let a_s_dagger: Mat<f64> = p.a.as_ref() * &isometry;
    Ok(SketchedProblem {
        parent: p,
        sketch: s,
        rescaler: DenseMatrix::from_mat(rescaler)?,
        isometry: DenseMatrix::from_mat(isometry)?,
        a_s_dagger: DenseMatrix::from_mat(a_s_dagger)?,
        rank,
    })
}

pub fn solve_sketched(sp: &SketchedProblem<'_>, opts: &SolverOptions) -> Result<SolveReport> {
    sp.program().solve(opts, None)
}

/// `x̃ = −λ⁻¹ Aᵀ y*` from the attached dual certificate.
pub fn recover(sp: &SketchedProblem<'_>, report: &SolveReport) -> Result<Vec<f64>> {
    if report.dual_certificate.len() != sp.parent.a.rows() {
        return Err(Error::param(format!(
            "dual certificate has length {}, expected {}",
            report.dual_certificate.len(),
            sp.parent.a.rows()
        )));
    }
    Ok(sp.parent.primal_from_dual(&report.dual_certificate))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionNumbers {
    /// Primal.
    pub kappa: f64,
    /// Unrescaled sketched program; infinite when singular.
    pub kappa_sketch: f64,
    /// Rescaled sketched program.
    pub kappa_rescaled: f64,
}

fn sym_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigenvalue solver failed: {e:?}")))
}

/// Condition numbers for objectives whose Hessian is a constant multiple of
/// the identity.
pub fn condition_numbers(p: &PrimalProblem, sp: &SketchedProblem<'_>) -> Result<ConditionNumbers> {
    let c = p
        .objective
        .as_smooth()
        .and_then(|f| f.constant_curvature())
        .ok_or_else(|| {
            Error::UnsupportedObjective(format!(
                "condition numbers need a constant Hessian; the {} loss has none",
                p.objective.name()
            ))
        })?;
    let lambda = p.lambda;
    let (n, d) = p.a.shape();
    let sv = singular_values(&p.a)?;
    let top = sv.first().copied().unwrap_or(0.0);
    // σ_d(AᵀHA) vanishes when d > n.
    let bottom = if d > n { 0.0 } else { sv.last().copied().unwrap_or(0.0) };
    let kappa = (lambda + c * top * top) / (lambda + c * bottom * bottom);

    let s = sp.sketch.matrix().as_ref();
    let as_: Mat<f64> = p.a.as_ref() * s;
    let mut sk: Mat<f64> = as_.transpose() * &as_ * faer::Scale(c);
    let sts: Mat<f64> = s.transpose() * s;
    sk += &sts * faer::Scale(lambda);
    let ev = sym_eigenvalues(&sk)?;
    let kappa_sketch = match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if lo > rank_tolerance(ev.len(), ev.len(), hi) => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    };

    let ad = sp.a_s_dagger.as_ref();
    let gram: Mat<f64> = ad.transpose() * ad * faer::Scale(c);
    let ev = sym_eigenvalues(&gram)?;
    let lo = ev.first().copied().unwrap_or(0.0).max(0.0);
    let hi = ev.last().copied().unwrap_or(0.0).max(0.0);
    Ok(ConditionNumbers {
        kappa,
        kappa_sketch,
        kappa_rescaled: (lambda + hi) / (lambda + lo),
    })
}

/// Scores `A x`, handy for checking the duality relations.
pub fn scores(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    mat_vec(a.as_ref(), x)
}

#[cfg(test)]
mod tests;
