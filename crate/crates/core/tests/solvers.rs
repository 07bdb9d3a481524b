mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use polyfw::solvers::*;
use polyfw::{Certificate, DesignMatrix, LassoProblem, SparseIterate};

fn identity_problem() -> LassoProblem {
    LassoProblem::new(DesignMatrix::identity(2), vec![2.0, -1.0], 1.0).unwrap()
}

fn tight() -> SolverConfig {
    SolverConfig {
        kkt_tol: 1e-10,
        time_budget_s: 10.0,
        ..Default::default()
    }
}

#[test]
fn step_sizes() {
    assert_eq!(step_size_schedule(1), 2.0 / 3.0);
    assert_eq!(step_size_schedule(2), 0.5);
    let mut prev = 1.0;
    for k in 1..10_000 {
        let g = step_size_schedule(k);
        assert!(g < prev && g > 0.0);
        prev = g;
    }
    assert!(step_size_schedule(1 << 40) < 1e-11);
}

#[test]
fn select_atom_examples() {
    let c = Certificate::from_values(vec![1.5, -0.5]);
    assert_eq!(select_atom(&c), Atom::Vertex { index: 0, sign: 1.0 });
    let c = Certificate::from_values(vec![0.2, -1.9]);
    assert_eq!(select_atom(&c), Atom::Vertex { index: 1, sign: -1.0 });
    let c = Certificate::from_values(vec![-2.0, 2.0]);
    assert_eq!(select_atom(&c), Atom::Vertex { index: 0, sign: -1.0 });
}

#[test]
fn apex_wins_below_unit_certificate() {
    // η = (0.9, −0.45) at x = 0 for A = I, λ = 1.
    let y = vec![0.9, -0.45];
    let lambda = 1.0;
    let p = LassoProblem::new(DesignMatrix::identity(2), y.clone(), lambda).unwrap();
    let eta = p.dual_certificate(&SparseIterate::zeros(2)).unwrap();
    assert!((eta.linf() - 0.9).abs() < 1e-15);

    // Gradient of ½‖y − Ax‖² + λt at (t, x) = (0, 0), enumerated against every extreme point.
    let a = DMatrix::<f64>::identity(2, 2);
    let grad_x = a.transpose() * (-DVector::from_vec(y));
    let grad_t = lambda;
    let m = p.lift_bound();
    let apex = 0.0;
    let mut best_vertex = f64::INFINITY;
    for i in 0..2 {
        for sign in [1.0, -1.0] {
            best_vertex = best_vertex.min(grad_t * m + sign * m * grad_x[i]);
        }
    }
    assert!(apex < best_vertex);
    assert_eq!(select_atom(&eta), Atom::Apex);
}

#[test]
fn polyatomic_index_examples() {
    let c = Certificate::from_values(vec![1.0, 0.95, 0.5, -0.97]);
    assert_eq!(polyatomic_indices(&c, 1.0, 0.1), vec![0, 1, 3]);
    assert_eq!(polyatomic_indices(&c, 0.0, 0.5), vec![0]);
    let flat = Certificate::from_values(vec![-0.3; 6]);
    assert_eq!(polyatomic_indices(&flat, 0.0, 1.0), (0..6).collect::<Vec<_>>());
}

fn g(a: f64, y: &[f64], lambda: f64, x: &[f64], t: f64, s: &[f64], ts: f64, gamma: f64) -> f64 {
    // A = a·I.
    let mut fit = 0.0;
    for i in 0..y.len() {
        let z = (1.0 - gamma) * x[i] + gamma * s[i];
        fit += (y[i] - a * z).powi(2);
    }
    0.5 * fit + lambda * ((1.0 - gamma) * t + gamma * ts)
}

#[test]
fn line_search_matches_dense_scan() {
    let p = LassoProblem::new(DesignMatrix::identity(2), vec![1.0, 0.0], 0.1).unwrap();
    assert_eq!(p.lift_bound(), 5.0);
    let atom = Atom::Vertex { index: 0, sign: 1.0 };
    let gamma = exact_line_search(&p, &LiftedIterate::origin(2), &atom).unwrap();

    let steps = 1_000_000;
    let (mut best, mut arg) = (f64::INFINITY, 0.0);
    for i in 0..=steps {
        let gm = i as f64 / steps as f64;
        let v = g(1.0, &[1.0, 0.0], 0.1, &[0.0, 0.0], 0.0, &[5.0, 0.0], 5.0, gm);
        if v < best {
            best = v;
            arg = gm;
        }
    }
    assert!((arg - 0.18).abs() <= 1e-6, "scan {arg}");
    assert!((gamma - arg).abs() <= 1e-6, "closed form {gamma} vs scan {arg}");
}

#[test]
fn line_search_clips_at_zero() {
    // Already at y: moving toward the atom only adds penalty, so g′(0) > 0.
    let p = LassoProblem::new(DesignMatrix::identity(2), vec![1.0, 0.0], 0.1).unwrap();
    let current = LiftedIterate {
        x: SparseIterate::new(2, vec![0], vec![1.0]).unwrap(),
        t: 1.0,
    };
    let atom = Atom::Vertex { index: 0, sign: 1.0 };
    let slope0 = (g(1.0, &[1.0, 0.0], 0.1, &[1.0, 0.0], 1.0, &[5.0, 0.0], 5.0, 1e-7)
        - g(1.0, &[1.0, 0.0], 0.1, &[1.0, 0.0], 1.0, &[5.0, 0.0], 5.0, 0.0))
        / 1e-7;
    assert!(slope0 >= 0.0);
    assert_eq!(exact_line_search(&p, &current, &atom).unwrap(), 0.0);
}

#[test]
fn line_search_clips_at_one() {
    // A = 0.1·I, y = (1, 0), λ = 0.1, M = 5, from (t, x) = (5, (−5, 0)) toward (5, (5, 0)).
    let a = DesignMatrix::diagonal(&[0.1, 0.1]).unwrap();
    let p = LassoProblem::new(a, vec![1.0, 0.0], 0.1).unwrap();
    assert_eq!(p.lift_bound(), 5.0);
    let current = LiftedIterate {
        x: SparseIterate::new(2, vec![0], vec![-5.0]).unwrap(),
        t: 5.0,
    };
    let at = |gm| g(0.1, &[1.0, 0.0], 0.1, &[-5.0, 0.0], 5.0, &[5.0, 0.0], 5.0, gm);
    assert!(at(1.0) - at(1.0 - 1e-7) <= 0.0);
    let atom = Atom::Vertex { index: 0, sign: 1.0 };
    assert_eq!(exact_line_search(&p, &current, &atom).unwrap(), 1.0);
}

#[test]
fn line_search_degenerate_direction_is_zero() {
    let p = LassoProblem::new(DesignMatrix::identity(2), vec![1.0, 0.0], 0.1).unwrap();
    assert_eq!(exact_line_search(&p, &LiftedIterate::origin(2), &Atom::Apex).unwrap(), 0.0);
}

#[test]
fn partial_correction_reaches_closed_form() {
    let p = identity_problem();
    let x = partial_correction(&p, &SparseIterate::zeros(2), &[0, 1], 1e-12).unwrap();
    let closed = polyfw::model::soft_threshold(p.y(), p.lambda());
    assert_eq!(closed, vec![1.0, 0.0]);
    assert!((x.get(0) - closed[0]).abs() <= 1e-9);
    assert_eq!(x.get(1), 0.0);
}

#[test]
fn partial_correction_fixed_point() {
    let p = identity_problem();
    let minimizer = SparseIterate::new(2, vec![0], vec![1.0]).unwrap();
    let (x, outcome) = partial_correction_with(&p, &minimizer, &[0, 1], 1e-6, None).unwrap();
    assert_eq!(outcome.iterations, 1);
    assert_eq!(x.support(), &[0]);
    assert!((x.get(0) - 1.0).abs() <= 1e-15);
}

#[test]
fn partial_correction_empty_active_set() {
    let p = identity_problem();
    assert!(partial_correction(&p, &SparseIterate::zeros(2), &[], 0.1).unwrap().is_zero());
}

#[test]
fn identity_problem_all_solvers() {
    let p = identity_problem();
    for kind in SolverKind::ALL {
        let out = solve(kind, &p, &tight()).unwrap();
        let x = out.solution.to_dense();
        assert!((x[0] - 1.0).abs() <= 1e-6 && x[1].abs() <= 1e-6, "{kind}: {x:?}");
        assert_eq!(out.trajectory.terminal_reason, TerminalReason::KktConverged, "{kind}");
    }
}

#[test]
fn fcfw_identity_needs_at_most_two_atoms() {
    let out = fcfw_solve(&identity_problem(), &tight()).unwrap();
    assert!(out.trajectory.iterations() <= 2);
    assert_eq!(out.solution.support(), &[0]);
}

#[test]
fn zero_solution_above_lambda_max() {
    for seed in 0..3 {
        let base = small_instance(seed);
        let p = LassoProblem::new(
            base.matrix().clone(),
            base.y().to_vec(),
            1.01 * base.lambda_max(),
        )
        .unwrap();
        // ‖η₀‖_∞ = ‖Aᵀy‖_∞ / λ = 1/1.01.
        let eta0 = p.dual_certificate(&SparseIterate::zeros(16)).unwrap();
        assert!((eta0.linf() - p.lambda_max() / p.lambda()).abs() <= 1e-15);
        assert!(eta0.linf() <= 1.0);
        let (oracle, _) = ista_oracle(&p, 10_000);
        assert!(oracle.iter().all(|&v| v == 0.0));

        for kind in SolverKind::ALL {
            let out = solve(kind, &p, &SolverConfig::default()).unwrap();
            assert!(out.solution.is_zero(), "{kind}");
            assert_eq!(out.trajectory.terminal_reason, TerminalReason::KktConverged);
            // Stopped at the first certificate check, before any update.
            assert_eq!(out.trajectory.samples.len(), 1);
            assert_eq!(out.trajectory.iterations(), 0);
        }
    }
}

#[test]
fn random_small_instances_match_oracle() {
    for seed in 0..3 {
        let p = small_instance(100 + seed);
        let (_, reference) = ista_oracle(&p, ORACLE_ITERATIONS);
        for kind in [SolverKind::Pfw, SolverKind::Fcfw, SolverKind::Fista] {
            let out = solve(kind, &p, &SolverConfig::default()).unwrap();
            assert_eq!(out.trajectory.terminal_reason, TerminalReason::KktConverged, "{kind}");
            let value = p.objective(&out.solution).unwrap();
            assert!(rel_diff(value, reference) <= 1e-6, "{kind} seed {seed}: {value} vs {reference}");
        }
    }
}

#[test]
fn curvature_bound_examples() {
    let p = LassoProblem::new(DesignMatrix::identity(2), vec![2.0, 0.0], 1.0).unwrap();
    assert_eq!(p.lift_bound(), 2.0);
    assert!((p.curvature_upper_bound() - 16.0).abs() <= 16.0 * 1e-4);

    let base = small_instance(7);
    let scaled = LassoProblem::new(base.matrix().scaled(3.0).unwrap(), base.y().to_vec(), base.lambda())
        .unwrap();
    let ratio = scaled.curvature_upper_bound() / base.curvature_upper_bound();
    assert!((ratio - 9.0).abs() <= 9.0 * 2e-4, "{ratio}");
}

#[test]
fn rate_bound_holds_on_random_instance() {
    let p = small_instance(8);
    let (_, reference) = ista_oracle(&p, ORACLE_ITERATIONS);
    let config = SolverConfig::default();
    let bound = p.curvature_upper_bound() + 2.0 * config.delta;
    let mut violations = 0;
    let mut seen = 0;
    let mut obs = |r: &IterationReport| {
        seen += 1;
        if r.objective - reference > 2.0 / (r.k as f64 + 2.0) * bound {
            violations += 1;
        }
    };
    pfw_solve_observed(&p, &config, &mut obs).unwrap();
    assert!(seen > 0);
    assert_eq!(violations, 0);
}
