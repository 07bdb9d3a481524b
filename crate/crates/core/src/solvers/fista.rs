//! FISTA with the constant step `1/(1.01·σ_max(A)²)`.
//!
//! `Ax` is carried along with `x`, so the extrapolated `Az` costs only vector
//! operations and each iteration needs one adjoint plus one forward product over the
//! nonzeros of the new iterate.

use super::clock::{stop_reason, Recorder};
use super::{kkt_satisfied, IterationReport, Observer, SolveOutput, SolverConfig};
use crate::error::Result;
use crate::model::linalg::{soft_threshold_scalar, LinearOperator, STEP_INFLATION};
use crate::model::{LassoProblem, SparseIterate};

pub fn fista_solve(problem: &LassoProblem, config: &SolverConfig) -> Result<SolveOutput> {
    fista_run(problem, config, None)
}

pub fn fista_solve_observed(
    problem: &LassoProblem,
    config: &SolverConfig,
    observer: Observer<'_>,
) -> Result<SolveOutput> {
    fista_run(problem, config, Some(observer))
}

fn fista_run(
    problem: &LassoProblem,
    config: &SolverConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<SolveOutput> {
    config.validate()?;
    let n = problem.cols();
    let rows = problem.rows();
    let a = problem.matrix();
    let y = problem.y();
    let lambda = problem.lambda();

    let mut rec = Recorder::new(config.record_every);
    let spectral = problem.spectral_norm_sq();
    let tau = if spectral > 0.0 {
        1.0 / (STEP_INFLATION * spectral)
    } else {
        0.0
    };

    let mut x = vec![0.0; n];
    let mut x_next = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut ax = vec![0.0; rows];
    let mut ax_next = vec![0.0; rows];
    let mut az = vec![0.0; rows];
    let mut grad = vec![0.0; n];
    let mut scratch = vec![0.0; rows];
    let mut momentum = 1.0f64;
    let mut k = 0;

    let reason = loop {
        // Certificate and objective of x_k are instrumentation: FISTA never uses them
        // to build its next iterate, so they are evaluated with the clock stopped, on
        // the recording stride.
        let mut stop = None;
        if rec.due(k) || k >= config.max_iter {
            rec.clock.pause();
            for ((r, f), yi) in scratch.iter_mut().zip(&ax).zip(y) {
                *r = yi - f;
            }
            let eta = problem.certificate_from_residual(&scratch);
            let current = SparseIterate::from_dense(&x);
            let kkt = kkt_satisfied(&eta, current.support(), current.weights(), config.kkt_tol);
            rec.clock.resume();
            stop = stop_reason(kkt, k, config, &rec.clock);
            rec.clock.pause();
            let objective = problem.objective_from_residual(&scratch, current.l1_norm());
            rec.push(k, objective, current.nnz(), eta.linf());
            rec.clock.resume();
        } else if rec.clock.elapsed_s() >= config.time_budget_s {
            stop = stop_reason(false, k, config, &rec.clock);
        }
        if let Some(reason) = stop {
            if !rec.due(k) {
                // Sample the final iterate even off-stride.
                rec.clock.pause();
                for ((r, f), yi) in scratch.iter_mut().zip(&ax).zip(y) {
                    *r = yi - f;
                }
                let eta = problem.certificate_from_residual(&scratch);
                let current = SparseIterate::from_dense(&x);
                let objective = problem.objective_from_residual(&scratch, current.l1_norm());
                rec.push(k, objective, current.nnz(), eta.linf());
            }
            break reason;
        }

        k += 1;
        for ((r, f), yi) in scratch.iter_mut().zip(&az).zip(y) {
            *r = f - yi;
        }
        a.adjoint_into(&scratch, &mut grad);
        let threshold = tau * lambda;
        for ((xn, zi), gi) in x_next.iter_mut().zip(&z).zip(&grad) {
            *xn = soft_threshold_scalar(zi - tau * gi, threshold);
        }
        a.apply_into(&x_next, &mut ax_next);

        let momentum_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / momentum_next;
        for ((zi, xn), xo) in z.iter_mut().zip(&x_next).zip(&x) {
            *zi = xn + beta * (xn - xo);
        }
        for ((azi, an), ao) in az.iter_mut().zip(&ax_next).zip(&ax) {
            *azi = an + beta * (an - ao);
        }
        momentum = momentum_next;
        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut ax, &mut ax_next);

        if let Some(obs) = observer.as_mut() {
            rec.clock.pause();
            for ((r, f), yi) in scratch.iter_mut().zip(&ax).zip(y) {
                *r = yi - f;
            }
            let eta = problem.certificate_from_residual(&scratch);
            let iterate = SparseIterate::from_dense(&x);
            obs(&IterationReport {
                k,
                gamma: tau,
                certificate: &eta,
                selected: &[],
                active: iterate.support(),
                active_after: iterate.support(),
                objective_before_correction: None,
                objective: problem.objective_from_residual(&scratch, iterate.l1_norm()),
                iterate: &iterate,
                lift: None,
                inner_iterations: 0,
            });
            rec.clock.resume();
        }
    };

    Ok(SolveOutput {
        solution: SparseIterate::from_dense(&x),
        trajectory: rec.finish(reason),
    })
}
