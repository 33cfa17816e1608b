//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs under `cargo test`. The process exits non-zero on a failure only
//! when `ASKETCH_ACCEPTANCE_STRICT=1`; otherwise failures are reported and
//! the run continues, so the line-by-line verdict is always complete.
//! `ASKETCH_ACCEPTANCE_ONLY=<n>` runs a single criterion.

use asketch::bounds::{kernel_zf, lemma1_check, predict_dimensions, zf_surrogate, Regime, C0};
use asketch::kernel::{solve_kernel_primal, solve_kernel_sketched, KernelMatrix};
use asketch::matrices::{gaussian_matrix, generate_decay_matrix, singular_values, DenseMatrix, SpectralProfile};
use asketch::objectives::{LipschitzObjective, SmoothObjective};
use asketch::refine::{inner_options, iterative_solve_tracked};
use asketch::sketch::adaptive_gaussian;
use asketch::solver::{
    build_sketched, condition_numbers, recover, solve_sketched, PrimalProblem, SolverOptions,
    StepSchedule,
};
use asketch_cli::compare::run_baseline_comparison;
use asketch_cli::config::{CompareConfig, Decay, ExperimentConfig, ObjectiveName, SketchName};
use asketch_cli::data::mix_seed;
use asketch_cli::sweep::run_sweep;
use std::time::{Duration, Instant};

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// `x* = Aᵀ(AAᵀ + λI)⁻¹ b`, the ridge solution through the `n × n` system.
fn ridge_oracle(a: &DenseMatrix, b: &[f64], lambda: f64) -> Vec<f64> {
    let n = a.rows();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| a.row(i)).collect();
    let g: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| rows[i].iter().zip(&rows[j]).map(|(u, v)| u * v).sum::<f64>() + if i == j { lambda } else { 0.0 })
                .collect()
        })
        .collect();
    a.tr_mul_vec(&solve_dense(g, b.to_vec()))
}

/// Exact solver for `min (1/n)‖Ax − y‖₁ + λ/2‖x‖²` through its dual, a
/// box-constrained quadratic in `z ∈ [−1/n, 1/n]ⁿ` solved by coordinate
/// descent. Returns `(x, primal value, dual value)`; the difference certifies
/// the accuracy.
fn l1_dual_oracle(a: &DenseMatrix, y: &[f64], lambda: f64) -> (Vec<f64>, f64, f64) {
    let n = a.rows();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| a.row(i)).collect();
    let diag: Vec<f64> = rows.iter().map(|r| r.iter().map(|v| v * v).sum()).collect();
    let box_ = 1.0 / n as f64;
    let mut z = vec![0.0; n];
    let evaluate = |z: &[f64]| {
        let w = a.tr_mul_vec(z);
        let x: Vec<f64> = w.iter().map(|v| -v / lambda).collect();
        let u = a.mul_vec(&x);
        let primal = u.iter().zip(y).map(|(u, y)| (u - y).abs()).sum::<f64>() * box_ + 0.5 * lambda * norm(&x).powi(2);
        let dual = -z.iter().zip(y).map(|(z, y)| z * y).sum::<f64>() - norm(&w).powi(2) / (2.0 * lambda);
        (x, primal, dual)
    };
    let mut best = evaluate(&z);
    for sweep in 1..=200_000 {
        let mut w = a.tr_mul_vec(&z);
        for i in 0..n {
            if diag[i] == 0.0 {
                continue;
            }
            let g = y[i] + rows[i].iter().zip(&w).map(|(r, w)| r * w).sum::<f64>() / lambda;
            let zi = (z[i] - g * lambda / diag[i]).clamp(-box_, box_);
            let delta = zi - z[i];
            if delta != 0.0 {
                w.iter_mut().zip(&rows[i]).for_each(|(w, r)| *w += delta * r);
                z[i] = zi;
            }
        }
        if sweep % 100 == 0 {
            best = evaluate(&z);
            if best.1 - best.2 <= 1e-15 * (1.0 + best.1.abs()) {
                break;
            }
        }
    }
    best
}

fn quadratic(a: DenseMatrix, b: &[f64], lambda: f64) -> PrimalProblem {
    PrimalProblem::new(a, SmoothObjective::quadratic(b.to_vec()).unwrap(), lambda).unwrap()
}

fn c1_exact_subspace() -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut ok = 0;
    for seed in 0..20u64 {
        let a = generate_decay_matrix(100, 200, &SpectralProfile::FiniteRank { rank: 20, scale: 10.0 }, seed).unwrap();
        let b = gaussian_matrix(100, 1, seed + 100).column(0);
        let lambda = 1e-2;
        let xstar = ridge_oracle(&a, &b, lambda);
        let p = quadratic(a.clone(), &b, lambda);
        let sp = build_sketched(&p, adaptive_gaussian(&a, 22, seed + 200).unwrap()).unwrap();
        let r = solve_sketched(&sp, &SolverOptions::newton().with_tol(1e-14)).unwrap();
        let e = dist(&recover(&sp, &r).unwrap(), &xstar) / norm(&xstar);
        worst = worst.max(e);
        if e <= 1e-8 {
            ok += 1;
        }
    }
    (ok == 20, format!("{ok}/20 seeds within 1e-8, worst relative error {worst:.2e}"))
}

fn c2_error_bound() -> (bool, String) {
    let mut ok = 0;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..100u64 {
        let h = mix_seed(&[2, i]);
        let n = 8 + (h % 57) as usize;
        let d = 8 + ((h >> 8) % 57) as usize;
        let m = 1 + ((h >> 16) as usize % (n.min(d) - 1));
        let a = if i % 2 == 0 {
            gaussian_matrix(n, d, h)
        } else {
            generate_decay_matrix(n, d, &SpectralProfile::Exponential { rate: 0.3, scale: 3.0 }, h).unwrap()
        };
        let b = gaussian_matrix(n, 1, h ^ 1).column(0);
        let s = adaptive_gaussian(&a, m, h ^ 2).unwrap();
        let z = zf_surrogate(&a, &s).unwrap();
        let lambda = 2.0 * z * z;
        let xstar = ridge_oracle(&a, &b, lambda);
        let p = quadratic(a, &b, lambda);
        let sp = build_sketched(&p, s).unwrap();
        let r = solve_sketched(&sp, &SolverOptions::newton().with_tol(1e-14)).unwrap();
        let err = dist(&recover(&sp, &r).unwrap(), &xstar);
        let bound = (1.0 / (2.0 * lambda)).sqrt() * z * norm(&xstar);
        worst_ratio = worst_ratio.max(err / bound);
        if err <= bound + 1e-8 {
            ok += 1;
        }
    }
    (ok == 100, format!("{ok}/100 instances, largest error/bound {worst_ratio:.3}"))
}

fn c3_sweeps() -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for (decay, lo, hi) in [(Decay::Exponential, -0.065, -0.035), (Decay::Polynomial, -1.3, -0.7)] {
        for objective in [ObjectiveName::Logistic, ObjectiveName::Relu] {
            let config = ExperimentConfig::sweep_preset(decay, objective, false);
            let result = match run_sweep(&config) {
                Ok(r) => r,
                Err(e) => return (false, format!("sweep failed: {e}")),
            };
            let ad = result.series(SketchName::Adaptive).unwrap();
            let ob = result.series(SketchName::Oblivious).unwrap();
            let slope = ad.fit.as_ref().map_or(f64::NAN, |f| f.slope);
            let in_band = slope >= lo && slope <= hi;
            let ordered = ad.per_m.len() == ob.per_m.len()
                && ad.per_m.iter().zip(&ob.per_m).all(|(a, o)| a.m == o.m && a.mean < o.mean);
            let flagged = ad.flagged.len() + ob.flagged.len();
            pass &= in_band && ordered && flagged == 0;
            parts.push(format!(
                "{}/{}: slope {slope:.4} in [{lo}, {hi}] {}, adaptive<oblivious {}, flagged {flagged}",
                match decay {
                    Decay::Exponential => "exp",
                    Decay::Polynomial => "poly",
                },
                objective.as_str(),
                if in_band { "yes" } else { "NO" },
                if ordered { "yes" } else { "NO" },
            ));
        }
    }
    (pass, parts.join("; "))
}

fn c4_refinement() -> (bool, String) {
    let a = generate_decay_matrix(40, 30, &SpectralProfile::Exponential { rate: 0.6, scale: 2.0 }, 4).unwrap();
    let s = adaptive_gaussian(&a, 10, 5).unwrap();
    let z = zf_surrogate(&a, &s).unwrap();
    let c = 0.5;
    // √(μ/2λ) z = c with μ = 1
    let lambda = z * z / (2.0 * c * c);
    let b = gaussian_matrix(40, 1, 6).column(0);
    let xstar = ridge_oracle(&a, &b, lambda);
    let p = quadratic(a, &b, lambda);
    let sp = build_sketched(&p, s).unwrap();
    let out = iterative_solve_tracked(&sp, 5, &inner_options(), Some(&xstar)).unwrap();
    let final_err = dist(&out.report.solution, &xstar);
    let bound = c.powi(5) * norm(&xstar) + 1e-7;
    let mut prev = norm(&xstar);
    let mut worst_ratio: f64 = 0.0;
    for h in &out.history {
        let e = h.error.unwrap();
        worst_ratio = worst_ratio.max(e / prev);
        prev = e;
    }
    let pass = out.history.len() == 5 && final_err <= bound && worst_ratio <= c + 0.05;
    (
        pass,
        format!(
            "c = {c}, final error {final_err:.3e} <= {bound:.3e}, worst per-step ratio {worst_ratio:.3}, steps {}",
            out.history.len()
        ),
    )
}

fn c5_condition() -> (bool, String) {
    let mut ok = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for i in 0..50u64 {
        let h = mix_seed(&[5, i]);
        let n = 10 + (h % 40) as usize;
        let d = 10 + ((h >> 8) % 40) as usize;
        let m = 1 + ((h >> 16) as usize % n.min(d));
        let a = generate_decay_matrix(n, d, &SpectralProfile::Polynomial { exponent: 1.0, scale: 5.0 }, h).unwrap();
        let b = gaussian_matrix(n, 1, h ^ 3).column(0);
        let lambda = 10f64.powi(-(((h >> 24) % 4) as i32));
        let p = quadratic(a.clone(), &b, lambda);
        let sp = build_sketched(&p, adaptive_gaussian(&a, m, h ^ 4).unwrap()).unwrap();
        let c = condition_numbers(&p, &sp).unwrap();
        worst = worst.max(c.kappa_rescaled - c.kappa);
        if c.kappa_rescaled <= c.kappa + 1e-10 {
            ok += 1;
        }
    }
    (ok == 50, format!("{ok}/50 instances, max(κ† − κ) = {worst:.3e}"))
}

fn c6_tail_probability() -> (bool, String) {
    let matrices = [
        gaussian_matrix(64, 128, 61),
        generate_decay_matrix(64, 128, &SpectralProfile::Exponential { rate: 0.2, scale: 8.0 }, 62).unwrap(),
        generate_decay_matrix(64, 128, &SpectralProfile::Polynomial { exponent: 1.0, scale: 8.0 }, 63).unwrap(),
        generate_decay_matrix(64, 128, &SpectralProfile::Polynomial { exponent: 2.0, scale: 8.0 }, 64).unwrap(),
        generate_decay_matrix(64, 128, &SpectralProfile::FiniteRank { rank: 12, scale: 8.0 }, 65).unwrap(),
    ];
    let mut all = true;
    let mut worst: f64 = 0.0;
    let mut total = 0;
    for (i, a) in matrices.iter().enumerate() {
        let check = lemma1_check(a, 8, 200, 1000 * i as u64).unwrap();
        total += check.surrogates.len();
        all &= check.surrogates.iter().all(|&z| z <= C0 * check.r_k);
        worst = check.surrogates.iter().fold(worst, |w, &z| w.max(z / check.r_k));
    }
    (all && total == 1000, format!("{total} trials, largest ‖P⊥Aᵀ‖/R_k = {worst:.3} (limit {C0})"))
}

fn half_norm(k: &KernelMatrix, w: &[f64]) -> f64 {
    let kw = k.matrix().mul_vec(w);
    kw.iter().zip(w).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
}

fn c7_kernel() -> (bool, String) {
    let opts = SolverOptions::newton().with_tol(1e-13);
    let mut consistent = 0;
    let mut worst: f64 = 0.0;
    let mut held = 0;
    let mut bound_ok = 0;
    for i in 0..20u64 {
        let h = mix_seed(&[7, i]);
        let (n, d, m) = (30, 20 + (i as usize % 3) * 10, 6 + (i as usize % 4) * 2);
        let a = generate_decay_matrix(n, d, &SpectralProfile::Exponential { rate: 0.4, scale: 3.0 }, h).unwrap();
        let (f, mu): (SmoothObjective, f64) = if i % 2 == 0 {
            (SmoothObjective::quadratic(gaussian_matrix(n, 1, h ^ 1).column(0)).unwrap(), 1.0)
        } else {
            let y = a.mul_vec(&gaussian_matrix(d, 1, h ^ 1).column(0)).iter().map(|v| if *v > 0.0 { 1.0 } else { 0.0 }).collect();
            (SmoothObjective::logistic(y).unwrap(), 0.25 / n as f64)
        };
        let s = adaptive_gaussian(&a, m, h ^ 2).unwrap();
        let z = kernel_zf(&KernelMatrix::from_features(&a).unwrap(), s.stilde().unwrap()).unwrap();
        // alternate between satisfying and violating λ ≥ 2μz²
        let lambda = (2.0 * mu * z * z * [0.25, 1.0, 4.0, 0.5][i as usize % 4]).max(1e-6);
        let p = PrimalProblem::new(a.clone(), f.clone(), lambda).unwrap();
        let sp = build_sketched(&p, s).unwrap();
        let xt = recover(&sp, &solve_sketched(&sp, &opts).unwrap()).unwrap();
        let k = KernelMatrix::from_features(&a).unwrap();
        let sol = solve_kernel_sketched(&k, f.clone(), lambda, m, h ^ 2, &opts).unwrap();
        let gap = dist(&a.tr_mul_vec(&sol.w), &xt);
        worst = worst.max(gap / (1.0 + norm(&xt)));
        if gap <= 1e-8 * (1.0 + norm(&xt)) {
            consistent += 1;
        }
        if lambda >= 2.0 * mu * z * z {
            held += 1;
            let wstar = solve_kernel_primal(&k, f, lambda, &opts).unwrap().w;
            let diff: Vec<f64> = sol.w.iter().zip(&wstar).map(|(u, v)| u - v).collect();
            let bound = (mu / (2.0 * lambda)).sqrt() * z * half_norm(&k, &wstar);
            if half_norm(&k, &diff) <= bound + 1e-8 {
                bound_ok += 1;
            }
        }
    }
    (
        consistent == 20 && bound_ok == held && held > 0,
        format!(
            "{consistent}/20 consistent (worst {worst:.2e}); kernel bound {bound_ok}/{held} where its hypothesis holds"
        ),
    )
}

fn c8_nonsmooth() -> (bool, String) {
    let (n, d, m) = (32, 64, 8);
    let a = gaussian_matrix(n, d, 81);
    let y = gaussian_matrix(n, 1, 82).column(0);
    let lambda = 0.1;
    let f = LipschitzObjective::absolute_deviation(y.clone()).unwrap();
    let lip = f.lipschitz();
    let (xstar, p_star, d_star) = l1_dual_oracle(&a, &y, lambda);
    let p = PrimalProblem::new(a.clone(), f, lambda).unwrap();
    let s = adaptive_gaussian(&a, m, 83).unwrap();
    let z = zf_surrogate(&a, &s).unwrap();
    let sp = build_sketched(&p, s).unwrap();
    let opts = SolverOptions::subgradient(20_000_000)
        .with_tol(1e-8)
        .with_schedule(StepSchedule::StronglyConvex);
    let report = solve_sketched(&sp, &opts).unwrap();
    let xt = recover(&sp, &report).unwrap();
    // the dual value of the reduced program is a certified lower bound
    let (_, _, lower) = l1_dual_oracle(sp.a_s_dagger(), &y, lambda);
    let gap = report.objective_value - lower;
    let precise = gap <= 1e-8 * (1.0 + lower.abs());
    let sigma1 = singular_values(&a).unwrap()[0];
    let bound = 6.0 * lip / lambda * (sigma1 * z).sqrt() + 1e-4;
    let err = dist(&xt, &xstar);
    (
        precise && err <= bound,
        format!(
            "error {err:.3e} (‖x*‖ {:.3e}) <= {bound:.3e}; oracle duality gap {:.1e}; subgradient gap {gap:.2e} at value {lower:.4} after {} iterations",
            norm(&xstar), p_star - d_star, report.iterations
        ),
    )
}

/// Independent transcription of the closed forms (natural logarithms).
fn closed_forms(regime: Regime, eps: f64, eta: f64, lambda: f64, d: f64) -> (f64, f64, f64) {
    match regime {
        Regime::FiniteRank { rho } => {
            let r = rho as f64;
            (r + 1.0 + (12.0 / eta).ln(), (r + 1.0) * (2.0 * r / eta).ln() / eps.powi(2), (r + 1.0) * (4.0 * r / eta).ln())
        }
        Regime::Exponential { kappa } => (
            (1.0 / (lambda * eps)).ln() / kappa + (12.0 / eta).ln(),
            (1.0 / lambda).ln() * (2.0 * d / eta).ln() / (kappa * eps.powi(2)),
            (1.0 / (lambda * eps)).ln() / kappa * (1.0 / eta).ln(),
        ),
        Regime::Polynomial { beta } => {
            let base = lambda.powf(-0.5 / beta) * eps.powf(-1.0 / beta);
            let power = if beta <= 2.0 { 2.0 } else { beta / (beta - 1.0) };
            (
                base + (12.0 / eta).ln(),
                lambda.powf(-0.5 / beta) * (2.0 * d / eta).ln() / eps.powi(2),
                base.powf(power) * (1.0 / eta).ln(),
            )
        }
    }
}

fn c9_predictors() -> (bool, String) {
    let points = [
        (Regime::FiniteRank { rho: 10 }, 0.1, 0.01, 1e-4, 2000),
        (Regime::FiniteRank { rho: 50 }, 0.05, 0.1, 1e-3, 1000),
        (Regime::FiniteRank { rho: 3 }, 0.5, 0.001, 1e-2, 100),
        (Regime::Exponential { kappa: 0.1 }, 0.1, 0.01, 1e-4, 2000),
        (Regime::Exponential { kappa: 1.0 }, 0.01, 0.05, 1e-6, 500),
        (Regime::Exponential { kappa: 0.05 }, 0.2, 0.1, 0.5, 10_000),
        (Regime::Polynomial { beta: 1.0 }, 0.1, 0.01, 1e-4, 2000),
        (Regime::Polynomial { beta: 2.0 }, 0.05, 0.01, 1e-3, 1000),
        (Regime::Polynomial { beta: 3.0 }, 0.1, 0.1, 1e-5, 5000),
        (Regime::Polynomial { beta: 0.75 }, 0.2, 0.05, 1e-2, 300),
    ];
    let mut pinned = 0;
    for &(regime, eps, eta, lambda, d) in &points {
        let p = predict_dimensions(regime, eps, eta, lambda, d).unwrap();
        let (ma, mo, ms) = closed_forms(regime, eps, eta, lambda, d as f64);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1.0);
        if close(p.m_adaptive, ma) && close(p.m_oblivious, mo) && close(p.m_leverage, ms) {
            pinned += 1;
        }
    }
    let anchor = predict_dimensions(Regime::FiniteRank { rho: 10 }, 0.1, 0.01, 1e-4, 2000).unwrap().m_adaptive;
    let anchor_ok = (anchor - 18.09).abs() < 0.005;

    // non-increasing in ε, η and λ on grids (finite rank does not depend on λ)
    let grid = [1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3];
    let regimes = [
        Regime::FiniteRank { rho: 20 },
        Regime::Exponential { kappa: 0.2 },
        Regime::Polynomial { beta: 1.5 },
        Regime::Polynomial { beta: 4.0 },
    ];
    let mut monotone = true;
    for regime in regimes {
        let at = |eps: f64, eta: f64, lambda: f64| predict_dimensions(regime, eps, eta, lambda, 1000).unwrap();
        for w in grid.windows(2) {
            let pairs = [
                (at(w[0], 0.01, 1e-4), at(w[1], 0.01, 1e-4)),
                (at(0.1, w[0], 1e-4), at(0.1, w[1], 1e-4)),
                (at(0.1, 0.01, w[0]), at(0.1, 0.01, w[1])),
            ];
            for (small, large) in pairs {
                monotone &= small.m_adaptive >= large.m_adaptive
                    && small.m_oblivious >= large.m_oblivious
                    && small.m_leverage >= large.m_leverage;
            }
        }
    }
    (
        pinned == points.len() && anchor_ok && monotone,
        format!("{pinned}/10 pinned points, m_A(ρ=10, η=0.01) = {anchor:.4}, monotone {monotone}"),
    )
}

fn c10_rff() -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in 0..3u64 {
        let config = CompareConfig {
            seed,
            m_grid: vec![128],
            ..CompareConfig::default()
        };
        let t = match run_baseline_comparison(&config) {
            Ok(t) => t,
            Err(e) => return (false, format!("comparison failed: {e}")),
        };
        let ad = t.get(SketchName::Adaptive, 128).unwrap();
        let ob = t.get(SketchName::Oblivious, 128).unwrap();
        let ok = (ad.test_error - t.primal_test_error).abs() <= 0.01 && ob.test_error > ad.test_error && ad.converged && ob.converged;
        pass &= ok;
        parts.push(format!(
            "seed {seed}: primal {:.3}, adaptive {:.3}, oblivious {:.3}",
            t.primal_test_error, ad.test_error, ob.test_error
        ));
    }
    (pass, parts.join("; "))
}

/// Name, time limit, check.
type Criterion = (&'static str, Duration, fn() -> (bool, String));

fn main() {
    // `cargo test` forwards harness flags such as `--list`; they need no work.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let only: Option<usize> = std::env::var("ASKETCH_ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let criteria: [Criterion; 10] = [
        ("exact-subspace recovery", Duration::from_secs(5), c1_exact_subspace),
        ("deterministic error bound", Duration::from_secs(30), c2_error_bound),
        ("decay-rate sweeps at full scale", Duration::from_secs(15 * 60), c3_sweeps),
        ("geometric refinement", Duration::from_secs(10), c4_refinement),
        ("rescaled conditioning", Duration::from_secs(30), c5_condition),
        ("spectral-tail probability", Duration::from_secs(60), c6_tail_probability),
        ("kernel/feature consistency", Duration::from_secs(30), c7_kernel),
        ("non-smooth error bound", Duration::from_secs(60), c8_nonsmooth),
        ("sketch-size predictors", Duration::from_secs(5), c9_predictors),
        ("random-feature classification", Duration::from_secs(5 * 60), c10_rff),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = ok && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1}s, limit {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    let ran = only.map_or(criteria.len(), |_| 1);
    println!("acceptance: {}/{ran} passed", ran - failures);
    let strict = std::env::var("ASKETCH_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failures > 0 {
        std::process::exit(1);
    }
}
