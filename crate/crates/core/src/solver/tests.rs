use super::*;
use crate::matrices::{distance, gaussian_matrix, generate_decay_matrix, norm2, SpectralProfile};
use crate::objectives::{LipschitzObjective, SmoothObjective};
use crate::sketch::{adaptive_gaussian, explicit_sketch, adaptive_from_stilde, oblivious_gaussian, SketchKind};
use proptest::prelude::*;

/// Dense Gaussian elimination with partial pivoting.
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

/// `(AᵀA + λI)⁻¹ Aᵀ b` by explicit loops.
fn ridge_oracle(a: &DenseMatrix, b: &[f64], lambda: f64) -> Vec<f64> {
    let (n, d) = a.shape();
    let mut g = vec![vec![0.0; d]; d];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..n).map(|k| a.get(k, i) * a.get(k, j)).sum::<f64>() + if i == j { lambda } else { 0.0 };
        }
    }
    let rhs: Vec<f64> = (0..d).map(|j| (0..n).map(|k| a.get(k, j) * b[k]).sum()).collect();
    solve_dense(g, rhs)
}

fn quadratic_problem(n: usize, d: usize, lambda: f64, seed: u64) -> (PrimalProblem, Vec<f64>) {
    let a = gaussian_matrix(n, d, seed);
    let b = gaussian_matrix(n, 1, seed.wrapping_add(1000)).column(0);
    let p = PrimalProblem::new(a, SmoothObjective::quadratic(b.clone()).unwrap(), lambda).unwrap();
    (p, b)
}

fn logistic_problem(n: usize, d: usize, lambda: f64, seed: u64) -> PrimalProblem {
    let a = gaussian_matrix(n, d, seed);
    let w = gaussian_matrix(d, 1, seed.wrapping_add(7)).column(0);
    let y: Vec<f64> = a.mul_vec(&w).iter().map(|v| if *v > 0.0 { 1.0 } else { 0.0 }).collect();
    PrimalProblem::new(a, SmoothObjective::logistic(y).unwrap(), lambda).unwrap()
}

fn orthonormal(d: usize, m: usize, seed: u64) -> DenseMatrix {
    let q = gaussian_matrix(d, m, seed).mat().qr().compute_thin_Q();
    DenseMatrix::from_mat(q).unwrap()
}

fn explicit(s: DenseMatrix) -> SketchOperator {
    explicit_sketch(s)
}

#[test]
fn quadratic_matches_normal_equations() {
    for (n, d) in [(30, 10), (10, 30)] {
        let (p, b) = quadratic_problem(n, d, 0.3, 3);
        let r = solve_primal(&p, &SolverOptions::newton()).unwrap();
        assert!(r.converged);
        let x = ridge_oracle(p.a(), &b, 0.3);
        assert!(distance(&r.solution, &x) < 1e-8, "{}", distance(&r.solution, &x));
    }
}

#[test]
fn zero_matrix_gives_zero_solution() {
    let a = DenseMatrix::zeros(5, 4);
    let objectives: Vec<Objective> = vec![
        SmoothObjective::quadratic(vec![1.0; 5]).unwrap().into(),
        SmoothObjective::logistic(vec![1.0, 0.0, 1.0, 0.0, 1.0]).unwrap().into(),
        SmoothObjective::relu_relaxation(vec![0.5; 5]).unwrap().into(),
    ];
    for f in objectives {
        let p = PrimalProblem::new(a.clone(), f, 0.1).unwrap();
        let r = solve_primal(&p, &SolverOptions::newton()).unwrap();
        assert!(norm2(&r.solution) < 1e-12);
    }
}

#[test]
fn primal_dual_identity() {
    let p = logistic_problem(60, 25, 1e-2, 11);
    let r = solve_primal(&p, &SolverOptions::newton()).unwrap();
    assert!(r.converged);
    let from_dual = p.primal_from_dual(&r.dual_certificate);
    assert!(distance(&from_dual, &r.solution) <= 1e-8 * (1.0 + norm2(&r.solution)));
    let u = scores(p.a(), &r.solution);
    let z = p.objective().first_order(&u);
    assert_eq!(z, r.dual_certificate);
}

#[test]
fn woodbury_and_direct_newton_agree() {
    // d > n goes through Woodbury; the transposed-shape instance through
    // the direct system. Compare against gradient descent on the same data.
    let p = logistic_problem(20, 50, 1e-1, 2);
    let newton = solve_primal(&p, &SolverOptions::newton()).unwrap();
    let gd = solve_primal(&p, &SolverOptions::gd().with_tol(1e-9)).unwrap();
    assert!(newton.converged && gd.converged);
    assert!(distance(&newton.solution, &gd.solution) < 1e-7);
}

#[test]
fn full_batch_methods_descend_monotonically() {
    let p = logistic_problem(40, 15, 1e-2, 5);
    for opts in [SolverOptions::newton(), SolverOptions::gd().with_max_iter(300)] {
        let r = solve_primal(&p, &opts).unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()), "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn stochastic_methods_converge() {
    let (p, b) = quadratic_problem(200, 10, 1.0, 8);
    let x = ridge_oracle(p.a(), &b, 1.0);
    let opts = SolverOptions::svrg(2e-4).with_tol(1e-8).with_seed(3);
    let r = solve_primal(&p, &opts).unwrap();
    assert!(r.converged, "grad {}", r.final_gradient_norm);
    assert!(distance(&r.solution, &x) < 1e-6);
    let r = solve_primal(&p, &SolverOptions::sgd(1e-4).with_max_iter(20_000).with_tol(1e-3)).unwrap();
    assert!(distance(&r.solution, &x) < 0.1 * (1.0 + norm2(&x)));
}

#[test]
fn non_convergence_is_flagged() {
    let p = logistic_problem(40, 15, 1e-4, 5);
    let r = solve_primal(&p, &SolverOptions::gd().with_max_iter(3)).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 3);
}

#[test]
fn smooth_methods_reject_lipschitz_objectives() {
    let a = gaussian_matrix(6, 3, 1);
    let f = LipschitzObjective::absolute_deviation(vec![0.0; 6]).unwrap();
    let p = PrimalProblem::new(a, f, 0.1).unwrap();
    for opts in [SolverOptions::newton(), SolverOptions::gd(), SolverOptions::sgd(0.1)] {
        assert!(matches!(solve_primal(&p, &opts), Err(Error::UnsupportedObjective(_))));
    }
    let r = solve_primal(&p, &SolverOptions::subgradient(2000)).unwrap();
    assert!(p.value(&r.solution) <= p.value(&[0.0; 3]));
}

#[test]
fn rejects_bad_parameters() {
    let a = gaussian_matrix(4, 3, 1);
    let f = SmoothObjective::quadratic(vec![0.0; 4]).unwrap();
    assert!(PrimalProblem::new(a.clone(), f.clone(), 0.0).is_err());
    assert!(PrimalProblem::new(a.clone(), SmoothObjective::quadratic(vec![0.0; 5]).unwrap(), 1.0).is_err());
    let p = PrimalProblem::new(a, f, 1.0).unwrap();
    assert!(solve_primal(&p, &SolverOptions::newton().with_tol(0.0)).is_err());
    assert!(solve_primal(&p, &SolverOptions::newton().with_max_iter(0)).is_err());
    assert!(solve_primal(&p, &SolverOptions { step_size: None, ..SolverOptions::sgd(1.0) }).is_err());
    assert_eq!("svrg".parse::<Method>().unwrap(), Method::Svrg);
    assert!("lbfgs".parse::<Method>().is_err());
}

#[test]
fn orthonormal_sketch_has_identity_rescaler() {
    let (p, _) = quadratic_problem(15, 12, 1.0, 1);
    let q = orthonormal(12, 5, 4);
    let sp = build_sketched(&p, explicit(q.clone())).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((sp.rescaler().get(i, j) - target).abs() < 1e-12);
        }
    }
    let as_ = p.a().matmul(&q).unwrap();
    assert!(DenseMatrix::from_mat(sp.a_s_dagger().mat() - as_.mat()).unwrap().max_abs() < 1e-12);

    let sp = build_sketched(&p, explicit(q.scaled(2.0).unwrap())).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let target = if i == j { 0.5 } else { 0.0 };
            assert!((sp.rescaler().get(i, j) - target).abs() < 1e-12);
        }
    }
}

fn check_projector(sp: &SketchedProblem<'_>, expected_rank: usize) {
    let s = sp.sketch().matrix();
    let r = sp.rescaler();
    let m = r.rows();
    for i in 0..m {
        for j in 0..m {
            assert!((r.get(i, j) - r.get(j, i)).abs() < 1e-10);
        }
    }
    let sts = s.transpose().matmul(s).unwrap();
    let proj = r.matmul(&sts).unwrap().matmul(r).unwrap();
    let sq = proj.matmul(&proj).unwrap();
    assert!(DenseMatrix::from_mat(sq.mat() - proj.mat()).unwrap().max_abs() < 1e-8);
    let trace: f64 = (0..m).map(|i| proj.get(i, i)).sum();
    assert!((trace - expected_rank as f64).abs() < 1e-8, "trace {trace}");
    // The projector fixes row(S).
    let back = s.matmul(&proj).unwrap();
    assert!(DenseMatrix::from_mat(back.mat() - s.mat()).unwrap().max_abs() < 1e-8 * s.max_abs());
}

#[test]
fn duplicated_column_gives_rank_deficient_projector() {
    let (p, _) = quadratic_problem(15, 12, 1.0, 1);
    let g = gaussian_matrix(12, 4, 6);
    let s = DenseMatrix::from_fn(12, 5, |i, j| g.get(i, j.min(3))).unwrap();
    let sp = build_sketched(&p, explicit(s)).unwrap();
    assert_eq!(sp.rank(), 4);
    check_projector(&sp, 4);
}

#[test]
fn exact_subspace_recovery() {
    // rank-6 matrix, m = 8 ≥ rank: the adaptive sketch spans row(A).
    let a = generate_decay_matrix(30, 20, &SpectralProfile::FiniteRank { rank: 6, scale: 3.0 }, 2).unwrap();
    let b = gaussian_matrix(30, 1, 5).column(0);
    let p = PrimalProblem::new(a.clone(), SmoothObjective::quadratic(b.clone()).unwrap(), 0.5).unwrap();
    let xstar = ridge_oracle(&a, &b, 0.5);
    let sp = build_sketched(&p, adaptive_gaussian(&a, 8, 9).unwrap()).unwrap();
    check_projector(&sp, 6);
    let r = solve_sketched(&sp, &SolverOptions::newton()).unwrap();
    assert!(r.converged);
    let xt = recover(&sp, &r).unwrap();
    assert!(distance(&xt, &xstar) < 1e-8, "{}", distance(&xt, &xstar));
    // AS α reproduces the scores at which y* was evaluated.
    let u = sp.a_s_dagger().mul_vec(&r.solution);
    assert_eq!(p.objective().first_order(&u), r.dual_certificate);
    let u2 = p.a().mul_vec(&sp.lift(&r.solution));
    assert!(distance(&u, &u2) < 1e-10 * (1.0 + norm2(&u)));
}

#[test]
fn zero_sketch_gives_zero() {
    let (p, _) = quadratic_problem(10, 6, 1.0, 1);
    let sp = build_sketched(&p, explicit(DenseMatrix::zeros(6, 3))).unwrap();
    assert_eq!(sp.rank(), 0);
    let r = solve_sketched(&sp, &SolverOptions::newton()).unwrap();
    assert!(r.solution.iter().all(|v| *v == 0.0));
}

#[test]
fn interpolating_case_recovers_zero() {
    // Labels equal to zero with the quadratic loss: ∇f(0) = 0 at the optimum.
    let a = gaussian_matrix(10, 8, 3);
    let p = PrimalProblem::new(a.clone(), SmoothObjective::quadratic(vec![0.0; 10]).unwrap(), 1.0).unwrap();
    let sp = build_sketched(&p, adaptive_gaussian(&a, 3, 1).unwrap()).unwrap();
    let r = solve_sketched(&sp, &SolverOptions::newton()).unwrap();
    assert!(recover(&sp, &r).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn sketched_value_dominates_primal() {
    let p = logistic_problem(40, 30, 1e-2, 4);
    let primal = solve_primal(&p, &SolverOptions::newton()).unwrap();
    for seed in 0..5 {
        let sp = build_sketched(&p, adaptive_gaussian(p.a(), 5, seed).unwrap()).unwrap();
        let r = solve_sketched(&sp, &SolverOptions::newton()).unwrap();
        assert!(r.objective_value >= primal.objective_value - 1e-10);
        // Same value as the lifted primal point.
        assert!((p.value(&sp.lift(&r.solution)) - r.objective_value).abs() < 1e-10);
    }
}

/// `‖(I − P_S) Aᵀ‖₂` via an explicit orthonormal basis of range(S).
fn residual_norm(a: &DenseMatrix, s: &DenseMatrix) -> f64 {
    let q = s.mat().qr().compute_thin_Q();
    let at = a.transpose();
    let proj: Mat<f64> = &q * (q.transpose() * at.mat());
    let resid = DenseMatrix::from_mat(at.mat() - proj).unwrap();
    crate::matrices::spectral_norm(&resid).unwrap()
}

#[test]
fn deterministic_error_bound_on_ridge_instances() {
    let mut checked = 0;
    for seed in 0..20u64 {
        let a = generate_decay_matrix(40, 30, &SpectralProfile::Exponential { rate: 0.8, scale: 2.0 }, seed).unwrap();
        let b = gaussian_matrix(40, 1, seed + 50).column(0);
        let s = adaptive_gaussian(&a, 10, seed + 99).unwrap();
        let z = residual_norm(&a, s.matrix());
        let lambda = (2.0 * z * z).max(1e-3);
        let p = PrimalProblem::new(a.clone(), SmoothObjective::quadratic(b.clone()).unwrap(), lambda).unwrap();
        let xstar = ridge_oracle(&a, &b, lambda);
        let sp = build_sketched(&p, s).unwrap();
        let xt = recover(&sp, &solve_sketched(&sp, &SolverOptions::newton()).unwrap()).unwrap();
        let bound = (1.0 / (2.0 * lambda)).sqrt() * z * norm2(&xstar);
        assert!(distance(&xt, &xstar) <= bound + 1e-8, "seed {seed}");
        checked += 1;
    }
    assert_eq!(checked, 20);
}

#[test]
fn condition_number_examples() {
    let p = PrimalProblem::new(DenseMatrix::identity(3), SmoothObjective::quadratic(vec![0.0; 3]).unwrap(), 1.0).unwrap();
    let sp = build_sketched(&p, adaptive_gaussian(p.a(), 2, 0).unwrap()).unwrap();
    assert!((condition_numbers(&p, &sp).unwrap().kappa - 1.0).abs() < 1e-14);

    let a = DenseMatrix::diagonal(&[2.0, 1.0]).unwrap();
    let p = PrimalProblem::new(a, SmoothObjective::quadratic(vec![0.0; 2]).unwrap(), 1.0).unwrap();
    let sp = build_sketched(&p, adaptive_gaussian(p.a(), 2, 0).unwrap()).unwrap();
    let c = condition_numbers(&p, &sp).unwrap();
    assert!((c.kappa - 2.5).abs() < 1e-14);

    let p = logistic_problem(10, 4, 1.0, 0);
    let sp = build_sketched(&p, adaptive_gaussian(p.a(), 2, 0).unwrap()).unwrap();
    assert!(matches!(condition_numbers(&p, &sp), Err(Error::UnsupportedObjective(_))));
}

#[test]
fn rescaled_condition_number_never_exceeds_primal() {
    for seed in 0..50u64 {
        let n = 10 + (seed as usize % 7);
        let d = 6 + (seed as usize % 11);
        let (p, _) = quadratic_problem(n, d, 0.1 + 0.05 * (seed % 5) as f64, seed);
        let sp = build_sketched(&p, adaptive_gaussian(p.a(), 1 + seed as usize % 5, seed).unwrap()).unwrap();
        let c = condition_numbers(&p, &sp).unwrap();
        assert!(c.kappa_rescaled <= c.kappa + 1e-10, "seed {seed}: {} > {}", c.kappa_rescaled, c.kappa);
        assert!(c.kappa_sketch >= 1.0);
    }
}

#[test]
fn oblivious_sketch_loses_accuracy() {
    let a = generate_decay_matrix(60, 40, &SpectralProfile::Exponential { rate: 0.5, scale: 5.0 }, 1).unwrap();
    let b = gaussian_matrix(60, 1, 2).column(0);
    let p = PrimalProblem::new(a.clone(), SmoothObjective::quadratic(b.clone()).unwrap(), 1e-2).unwrap();
    let xstar = ridge_oracle(&a, &b, 1e-2);
    let err = |s: SketchOperator| {
        let sp = build_sketched(&p, s).unwrap();
        distance(&recover(&sp, &solve_sketched(&sp, &SolverOptions::newton()).unwrap()).unwrap(), &xstar)
    };
    let adaptive = err(adaptive_gaussian(&a, 12, 3).unwrap());
    let oblivious = err(oblivious_gaussian(40, 12, 3).unwrap());
    assert!(adaptive < oblivious);
    assert_eq!(adaptive_from_stilde(&a, gaussian_matrix(60, 2, 1)).unwrap().kind(), SketchKind::AdaptiveGaussian);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn converged_solves_satisfy_kkt(n in 3usize..25, d in 2usize..25, m in 1usize..8,
                                    log_lambda in -3.0f64..1.0, seed in any::<u64>()) {
        let p = logistic_problem(n, d, 10f64.powf(log_lambda), seed);
        // ‖x + λ⁻¹Aᵀz‖ = ‖grad‖/λ, so the duality check needs tol ≪ λ·1e-8.
        let opts = SolverOptions::newton().with_tol(1e-12);
        let r = solve_primal(&p, &opts).unwrap();
        prop_assert!(r.converged);
        prop_assert!(p.gradient_norm(&r.solution) <= opts.tol * (1.0 + norm2(&r.solution)));
        let x = p.primal_from_dual(&r.dual_certificate);
        prop_assert!(distance(&x, &r.solution) <= 1e-8 * (1.0 + norm2(&r.solution)));

        let sp = build_sketched(&p, adaptive_gaussian(p.a(), m, seed ^ 1).unwrap()).unwrap();
        let r = solve_sketched(&sp, &opts).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.final_gradient_norm <= opts.tol * (1.0 + norm2(&r.solution)));
        let ri = sp.rescaler();
        for i in 0..m {
            for j in 0..m {
                prop_assert!((ri.get(i, j) - ri.get(j, i)).abs() < 1e-10);
            }
        }
    }
}
