//! Iterative adaptive sketching with a fixed sketch.
//!
//! Starting from `x̃⁰ = 0`, each step solves
//!
//! ```text
//! α^t = argmin f(A_{S,†} α + a^t) + (λ/2)‖α + b^t‖²,
//!       a^t = A x̃^{t−1},  b^t = R Sᵀ x̃^{t−1}
//! ```
//!
//! and sets `x̃^t = −λ⁻¹ Aᵀ ∇f(A_{S,†} α^t + a^t)`. The sketch and
//! `A_{S,†}` are built once and shared by all steps.

use crate::error::{Error, Result};
use crate::matrices::{distance, norm2};
use crate::sketch::power_sketch;
use crate::solver::{build_sketched, PrimalProblem, SketchedProblem, SolveReport, SolverOptions};
use std::time::Instant;

/// One row of the refinement history.
#[derive(Clone, Debug, PartialEq)]
pub struct RefineRecord {
    pub t: usize,
    /// Primal objective at `x̃^t`.
    pub objective: f64,
    /// `‖x̃^t − x*‖₂` when a reference solution was supplied.
    pub error: Option<f64>,
    pub inner_iterations: usize,
    pub inner_converged: bool,
}

#[derive(Clone, Debug)]
pub struct RefineState {
    pub iterate: Vec<f64>,
    /// `A x̃^{t−1}`, recomputed from the iterate each step.
    pub a_t: Vec<f64>,
    /// `R Sᵀ x̃^{t−1}`.
    pub b_t: Vec<f64>,
    pub t: usize,
    pub history: Vec<RefineRecord>,
}

#[derive(Clone, Debug)]
pub struct RefineOutcome {
    /// `solution` is `x̃^T`; `converged` means every inner solve converged.
    pub report: SolveReport,
    pub history: Vec<RefineRecord>,
}

/// Inner solver settings used by default: Newton to `1e-12`.
pub fn inner_options() -> SolverOptions {
    SolverOptions::newton().with_tol(1e-12)
}

pub fn iterative_solve(sp: &SketchedProblem<'_>, t: usize, opts: &SolverOptions) -> Result<RefineOutcome> {
    iterative_solve_tracked(sp, t, opts, None)
}

/// Like [`iterative_solve`], recording `‖x̃^t − x*‖₂` against `reference`.
pub fn iterative_solve_tracked(
    sp: &SketchedProblem<'_>,
    t_max: usize,
    opts: &SolverOptions,
    reference: Option<&[f64]>,
) -> Result<RefineOutcome> {
    if t_max == 0 {
        return Err(Error::param("the number of refinement steps T must be at least 1"));
    }
    let p = sp.parent();
    if let Some(r) = reference {
        if r.len() != p.dim() {
            return Err(Error::param(format!("reference has length {}, expected {}", r.len(), p.dim())));
        }
    }
    if p.objective().as_smooth().is_none() {
        return Err(Error::UnsupportedObjective(format!(
            "iterative refinement needs a smooth loss, got {}",
            p.objective().name()
        )));
    }
    let clock = Instant::now();
    let mut state = RefineState {
        iterate: vec![0.0; p.dim()],
        a_t: vec![0.0; p.a().rows()],
        b_t: vec![0.0; sp.sketch_size()],
        t: 0,
        history: Vec::new(),
    };
    let mut all_converged = true;
    let mut certificate = vec![0.0; p.a().rows()];
    while state.t < t_max {
        state.a_t = p.a().mul_vec(&state.iterate);
        state.b_t = sp.reduce(&state.iterate);
        let mut program = sp.program();
        program.offset = Some(&state.a_t);
        program.shift = Some(&state.b_t);
        let inner = program.solve(opts, None)?;
        all_converged &= inner.converged;
        let next = p.primal_from_dual(&inner.dual_certificate);
        certificate = inner.dual_certificate;
        let step = distance(&next, &state.iterate);
        state.iterate = next;
        state.t += 1;
        state.history.push(RefineRecord {
            t: state.t,
            objective: p.value(&state.iterate),
            error: reference.map(|r| distance(&state.iterate, r)),
            inner_iterations: inner.iterations,
            inner_converged: inner.converged,
        });
        if !inner.converged || step <= 1e-14 * (1.0 + norm2(&state.iterate)) {
            break;
        }
    }
    let report = SolveReport {
        final_gradient_norm: p.gradient_norm(&state.iterate),
        objective_value: p.value(&state.iterate),
        solution: state.iterate,
        dual_certificate: certificate,
        iterations: state.t,
        wall_time: clock.elapsed().as_secs_f64(),
        converged: all_converged,
        method: opts.method,
        trace: state.history.iter().map(|h| h.objective).collect(),
    };
    Ok(RefineOutcome {
        report,
        history: state.history,
    })
}

/// Iterative refinement over the power sketch `S = (AᵀA)^q Aᵀ S̃`.
pub fn refine_with_power(
    p: &PrimalProblem,
    m: usize,
    q: usize,
    t: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<RefineOutcome> {
    refine_with_power_tracked(p, m, q, t, seed, opts, None)
}

pub fn refine_with_power_tracked(
    p: &PrimalProblem,
    m: usize,
    q: usize,
    t: usize,
    seed: u64,
    opts: &SolverOptions,
    reference: Option<&[f64]>,
) -> Result<RefineOutcome> {
    let sp = build_sketched(p, power_sketch(p.a(), m, q, seed)?)?;
    iterative_solve_tracked(&sp, t, opts, reference)
}
