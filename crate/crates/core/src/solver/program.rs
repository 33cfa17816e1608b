//! Iterative methods for the generic ridge program
//!
//! ```text
//! minimize_x  f(M x + offset) + (λ/2) ‖x + shift‖²
//! ```
//!
//! which covers the primal (`M = A`), the rescaled sketched program
//! (`M = A_{S,†}`) and the shifted inner problems of iterative refinement.

use super::{Method, SolveReport, SolverOptions, StepSchedule};
use crate::error::{Error, Result};
use crate::matrices::{mat_vec, norm2, singular_values, DenseMatrix};
use crate::objectives::{Objective, SmoothObjective};
use crate::random::seeded_rng;
use faer::{Mat, MatRef, Side};
use rand::Rng;
use std::time::Instant;

pub(crate) struct RidgeProgram<'a> {
    pub matrix: MatRef<'a, f64>,
    pub offset: Option<&'a [f64]>,
    pub shift: Option<&'a [f64]>,
    pub lambda: f64,
    pub objective: &'a Objective,
}

impl<'a> RidgeProgram<'a> {
    pub fn new(matrix: MatRef<'a, f64>, lambda: f64, objective: &'a Objective) -> Self {
        Self {
            matrix,
            offset: None,
            shift: None,
            lambda,
            objective,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut u = mat_vec(self.matrix, x);
        if let Some(off) = self.offset {
            u.iter_mut().zip(off).for_each(|(a, b)| *a += b);
        }
        u
    }

    fn shifted_norm_sq(&self, x: &[f64]) -> f64 {
        match self.shift {
            Some(s) => x.iter().zip(s).map(|(a, b)| (a + b) * (a + b)).sum(),
            None => x.iter().map(|a| a * a).sum(),
        }
    }

    pub fn value_at_scores(&self, x: &[f64], u: &[f64]) -> f64 {
        self.objective.value(u) + 0.5 * self.lambda * self.shifted_norm_sq(x)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_at_scores(x, &self.scores(x))
    }

    /// `Mᵀ g + λ (x + shift)`.
    fn assemble_gradient(&self, x: &[f64], loss_grad: &[f64]) -> Vec<f64> {
        let mut g = mat_vec(self.matrix.transpose(), loss_grad);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj += self.lambda * (x[j] + self.shift.map_or(0.0, |s| s[j]));
        }
        g
    }

    /// Returns `(gradient, scores, ∇f(scores))`.
    pub fn gradient(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let u = self.scores(x);
        let lg = self.objective.first_order(&u);
        (self.assemble_gradient(x, &lg), u, lg)
    }

    fn smooth(&self) -> Result<&'a SmoothObjective> {
        self.objective.as_smooth().ok_or_else(|| {
            Error::UnsupportedObjective(format!(
                "the {} loss is not smooth; use the subgradient method",
                self.objective.name()
            ))
        })
    }

    fn initial_point(&self, start: Option<&[f64]>) -> Result<Vec<f64>> {
        match start {
            Some(s) if s.len() != self.dim() => Err(Error::param(format!(
                "starting point has length {}, expected {}",
                s.len(),
                self.dim()
            ))),
            Some(s) => Ok(s.to_vec()),
            None => Ok(vec![0.0; self.dim()]),
        }
    }

    pub fn solve(&self, opts: &SolverOptions, start: Option<&[f64]>) -> Result<SolveReport> {
        opts.validate()?;
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::param(format!("lambda must be positive, got {}", self.lambda)));
        }
        let x0 = self.initial_point(start)?;
        let clock = Instant::now();
        let mut report = match opts.method {
            Method::Newton => self.newton(opts, x0)?,
            Method::Gd => self.gradient_descent(opts, x0)?,
            Method::Sgd => self.stochastic(opts, x0, false)?,
            Method::Svrg => self.stochastic(opts, x0, true)?,
            Method::Subgradient => self.subgradient(opts, x0),
        };
        report.wall_time = clock.elapsed().as_secs_f64();
        Ok(report)
    }

    fn finish(&self, method: Method, x: Vec<f64>, iterations: usize, converged: bool, trace: Vec<f64>) -> SolveReport {
        let (g, u, lg) = self.gradient(&x);
        SolveReport {
            objective_value: self.value_at_scores(&x, &u),
            final_gradient_norm: norm2(&g),
            solution: x,
            dual_certificate: lg,
            iterations,
            converged,
            method,
            wall_time: 0.0,
            trace,
        }
    }

    fn converged(opts: &SolverOptions, grad_norm: f64, x: &[f64]) -> bool {
        grad_norm <= opts.tol * (1.0 + norm2(x))
    }

    fn newton(&self, opts: &SolverOptions, mut x: Vec<f64>) -> Result<SolveReport> {
        let f = self.smooth()?;
        let (n, p) = (self.matrix.nrows(), self.matrix.ncols());
        // Woodbury on the n×n side when the variable is the larger dimension.
        let gram_rows: Option<Mat<f64>> = (p > n).then(|| self.matrix * self.matrix.transpose());
        let mut trace = Vec::new();
        let mut iterations = 0;
        let mut converged = false;
        let (mut g, mut u, _) = self.gradient(&x);
        let mut value = self.value_at_scores(&x, &u);
        trace.push(value);
        while iterations < opts.max_iter {
            if Self::converged(opts, norm2(&g), &x) {
                converged = true;
                break;
            }
            let h = f.hessian_diagonal(&u);
            let step = self.newton_direction(&h, &g, gram_rows.as_ref())?;
            let mut eta = if iterations < opts.newton_damped_iters { opts.newton_damped_step } else { 1.0 };
            // Monotonicity guard: halve the step while the objective increases.
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a - eta * d).collect();
                let tu = self.scores(&trial);
                let tv = self.value_at_scores(&trial, &tu);
                if tv <= value + 1e-14 * (1.0 + value.abs()) {
                    accepted = Some((trial, tu, tv));
                    break;
                }
                eta *= 0.5;
            }
            iterations += 1;
            let Some((nx, nu, nv)) = accepted else {
                break;
            };
            x = nx;
            u = nu;
            value = nv;
            trace.push(value);
            let lg = f.gradient(&u);
            g = self.assemble_gradient(&x, &lg);
        }
        if !converged && Self::converged(opts, norm2(&g), &x) {
            converged = true;
        }
        Ok(self.finish(Method::Newton, x, iterations, converged, trace))
    }

    /// Solves `(λI + Mᵀ diag(h) M) δ = g`.
    fn newton_direction(&self, h: &[f64], g: &[f64], gram_rows: Option<&Mat<f64>>) -> Result<Vec<f64>> {
        let m = self.matrix;
        let (n, p) = (m.nrows(), m.ncols());
        let lambda = self.lambda;
        let fail = |e| Error::Numerical(format!("Newton system is not positive definite: {e:?}"));
        match gram_rows {
            None => {
                let weighted = Mat::from_fn(n, p, |i, j| h[i] * m[(i, j)]);
                let mut hess: Mat<f64> = m.transpose() * &weighted;
                for j in 0..p {
                    hess[(j, j)] += lambda;
                }
                let llt = hess.llt(Side::Lower).map_err(fail)?;
                let rhs = Mat::from_fn(p, 1, |i, _| g[i]);
                let sol = faer::linalg::solvers::Solve::solve(&llt, &rhs);
                Ok(sol.col(0).iter().copied().collect())
            }
            Some(mmt) => {
                // (λI + BᵀB)⁻¹ g = λ⁻¹ (g − Bᵀ (λI + BBᵀ)⁻¹ B g),  B = diag(√h) M.
                let s: Vec<f64> = h.iter().map(|v| v.max(0.0).sqrt()).collect();
                let mut inner = Mat::from_fn(n, n, |i, j| s[i] * mmt[(i, j)] * s[j]);
                for i in 0..n {
                    inner[(i, i)] += lambda;
                }
                let mg = mat_vec(m, g);
                let rhs = Mat::from_fn(n, 1, |i, _| s[i] * mg[i]);
                let llt = inner.llt(Side::Lower).map_err(fail)?;
                let t = faer::linalg::solvers::Solve::solve(&llt, &rhs);
                let st: Vec<f64> = (0..n).map(|i| s[i] * t[(i, 0)]).collect();
                let back = mat_vec(m.transpose(), &st);
                Ok(g.iter().zip(&back).map(|(a, b)| (a - b) / lambda).collect())
            }
        }
    }

    /// Smoothness of the full objective: `μ ‖M‖₂² + λ`.
    fn lipschitz_gradient(&self, f: &SmoothObjective) -> Result<f64> {
        let sigma = singular_values(&DenseMatrix::from_mat(self.matrix.to_owned())?)?
            .first()
            .copied()
            .unwrap_or(0.0);
        Ok(f.smoothness() * sigma * sigma + self.lambda)
    }

    fn gradient_descent(&self, opts: &SolverOptions, mut x: Vec<f64>) -> Result<SolveReport> {
        let f = self.smooth()?;
        let step = match opts.step_size {
            Some(s) => s,
            None => 1.0 / self.lipschitz_gradient(f)?,
        };
        let mut trace = Vec::new();
        let mut iterations = 0;
        let mut converged = false;
        loop {
            let (g, u, _) = self.gradient(&x);
            trace.push(self.value_at_scores(&x, &u));
            if Self::converged(opts, norm2(&g), &x) {
                converged = true;
                break;
            }
            if iterations == opts.max_iter {
                break;
            }
            x.iter_mut().zip(&g).for_each(|(a, d)| *a -= step * d);
            iterations += 1;
        }
        Ok(self.finish(Method::Gd, x, iterations, converged, trace))
    }

    /// Minibatch SGD, or SVRG when `variance_reduced`.
    fn stochastic(&self, opts: &SolverOptions, mut x: Vec<f64>, variance_reduced: bool) -> Result<SolveReport> {
        let f = self.smooth()?;
        let m = self.matrix;
        let (n, p) = (m.nrows(), m.ncols());
        let step = opts
            .step_size
            .ok_or_else(|| Error::param("stochastic methods need an explicit step size"))?;
        let batch = opts.batch.min(n).max(1);
        let scale = n as f64 / batch as f64;
        let row_score = |i: usize, x: &[f64]| -> f64 {
            let row = m.row(i);
            let mut acc = self.offset.map_or(0.0, |o| o[i]);
            for j in 0..p {
                acc += row[j] * x[j];
            }
            acc
        };
        let method = if variance_reduced { Method::Svrg } else { Method::Sgd };
        let check_every = if variance_reduced { opts.svrg_update_every } else { (n / batch).max(1) };
        let mut rng = seeded_rng(opts.seed);
        let mut trace = Vec::new();
        let mut snapshot = x.clone();
        let mut snapshot_grad = vec![0.0; p];
        let mut iterations = 0;
        let mut converged = false;
        let mut direction = vec![0.0; p];
        while iterations < opts.max_iter {
            if iterations % check_every == 0 {
                let (g, u, lg) = self.gradient(&x);
                trace.push(self.value_at_scores(&x, &u));
                if Self::converged(opts, norm2(&g), &x) {
                    converged = true;
                    break;
                }
                if variance_reduced {
                    snapshot.clone_from(&x);
                    snapshot_grad = mat_vec(m.transpose(), &lg);
                }
            }
            if variance_reduced {
                direction.clone_from(&snapshot_grad);
            } else {
                direction.iter_mut().for_each(|v| *v = 0.0);
            }
            for _ in 0..batch {
                let i = rng.random_range(0..n);
                let mut coef = f.coordinate_derivative(i, row_score(i, &x));
                if variance_reduced {
                    coef -= f.coordinate_derivative(i, row_score(i, &snapshot));
                }
                let row = m.row(i);
                for j in 0..p {
                    direction[j] += scale * coef * row[j];
                }
            }
            for j in 0..p {
                let reg = self.lambda * (x[j] + self.shift.map_or(0.0, |s| s[j]));
                x[j] -= step * (direction[j] + reg);
            }
            iterations += 1;
        }
        if !converged {
            let (g, _, _) = self.gradient(&x);
            converged = Self::converged(opts, norm2(&g), &x);
        }
        Ok(self.finish(method, x, iterations, converged, trace))
    }

    /// Subgradient method; returns the best iterate seen.
    fn subgradient(&self, opts: &SolverOptions, mut x: Vec<f64>) -> SolveReport {
        let c = opts.step_size.unwrap_or(1.0);
        let mut best = x.clone();
        let mut best_value = self.value(&x);
        let mut trace = vec![best_value];
        let window_start = opts.max_iter - opts.max_iter / 10;
        let mut value_at_window = best_value;
        for t in 0..opts.max_iter {
            if t == window_start {
                value_at_window = best_value;
            }
            let (g, _, _) = self.gradient(&x);
            let eta = match opts.schedule {
                StepSchedule::InverseSqrt => c / ((t + 1) as f64).sqrt(),
                StepSchedule::StronglyConvex => c / (self.lambda * (t + 1) as f64),
            };
            x.iter_mut().zip(&g).for_each(|(a, d)| *a -= eta * d);
            let v = self.value(&x);
            if v < best_value {
                best_value = v;
                best.clone_from(&x);
            }
            if (t + 1) % 1000 == 0 {
                trace.push(best_value);
            }
        }
        let converged = value_at_window - best_value <= opts.tol * (1.0 + best_value.abs());
        self.finish(Method::Subgradient, best, opts.max_iter, converged, trace)
    }
}
