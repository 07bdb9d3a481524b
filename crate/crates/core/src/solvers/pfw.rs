//! Polyatomic Frank-Wolfe.

use super::atoms::{polyatomic_indices, step_size_schedule};
use super::clock::{stop_reason, Recorder};
use super::correction::{correct, CorrectionLimits};
use super::{kkt_satisfied, IterationReport, Observer, SolveOutput, SolverConfig};
use crate::error::Result;
use crate::model::{LassoProblem, SparseIterate};

pub fn pfw_solve(problem: &LassoProblem, config: &SolverConfig) -> Result<SolveOutput> {
    pfw_run(problem, config, None)
}

pub fn pfw_solve_observed(
    problem: &LassoProblem,
    config: &SolverConfig,
    observer: Observer<'_>,
) -> Result<SolveOutput> {
    pfw_run(problem, config, Some(observer))
}

fn pfw_run(
    problem: &LassoProblem,
    config: &SolverConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<SolveOutput> {
    config.validate()?;
    let n = problem.cols();
    let m = problem.lift_bound();
    let y = problem.y();

    let mut rec = Recorder::new(config.record_every);
    let mut x = SparseIterate::zeros(n);
    let mut forward = vec![0.0; problem.rows()];
    let mut residual = y.to_vec();
    let mut active: Vec<usize> = Vec::new();
    // Leading singular vector of A_S, aligned with `active`.
    let mut spectral_vector: Vec<f64> = Vec::new();
    let mut k = 0;

    let reason = loop {
        for ((r, f), yi) in residual.iter_mut().zip(&forward).zip(y) {
            *r = yi - f;
        }
        let eta = problem.certificate_from_residual(&residual);
        let kkt = kkt_satisfied(&eta, x.support(), x.weights(), config.kkt_tol);
        let stop = stop_reason(kkt, k, config, &rec.clock);

        if rec.due(k) || stop.is_some() {
            rec.clock.pause();
            let objective = problem.objective_from_residual(&residual, x.l1_norm());
            rec.push(k, objective, x.nnz(), eta.linf());
            rec.clock.resume();
        }
        if let Some(reason) = stop {
            break reason;
        }

        k += 1;
        let gamma = step_size_schedule(k);
        let selected = polyatomic_indices(&eta, config.delta, gamma);

        // S_k = S_{k−1} ∪ I_k, and x_{k+1/2} = (1−γ)x_k + γ s_k expressed on S_k
        // with s_k = (M/|I_k|) Σ sgn(η_i) e_i.
        let merged = merge_sorted(&active, &selected);
        let atom_weight = gamma * m / selected.len() as f64;
        let mut init = vec![0.0; merged.len()];
        let mut warm = vec![0.0; merged.len()];
        {
            let mut xi = x.iter().peekable();
            let mut si = selected.iter().peekable();
            let mut vi = active.iter().zip(&spectral_vector).peekable();
            for (pos, &j) in merged.iter().enumerate() {
                if let Some(&(i, w)) = xi.peek() {
                    if i == j {
                        init[pos] += (1.0 - gamma) * w;
                        xi.next();
                    }
                }
                if si.peek() == Some(&&j) {
                    init[pos] += atom_weight * eta.values()[j].signum();
                    si.next();
                }
                if let Some(&(&i, &v)) = vi.peek() {
                    if i == j {
                        warm[pos] = v;
                        vi.next();
                    }
                }
            }
        }

        let objective_before = if observer.is_some() {
            rec.clock.pause();
            let half = SparseIterate::from_parts_dropping_zeros(n, &merged, &init);
            let value = problem.objective(&half)?;
            rec.clock.resume();
            Some(value)
        } else {
            None
        };

        let eps = config.eps0 * gamma;
        let outcome = correct(
            problem,
            &merged,
            init,
            eps,
            CorrectionLimits {
                max_iter: Some(config.max_inner_iter),
                spectral_init: Some(&warm),
                deadline: Some((&rec.clock, config.time_budget_s)),
            },
        );
        x = SparseIterate::from_parts_dropping_zeros(n, &merged, &outcome.weights);
        forward = outcome.forward;

        let (next_active, next_vector) = if config.prune {
            merged
                .iter()
                .zip(&outcome.weights)
                .zip(&outcome.spectral_vector)
                .filter(|((_, w), _)| **w != 0.0)
                .map(|((j, _), v)| (*j, *v))
                .unzip()
        } else {
            (merged.clone(), outcome.spectral_vector)
        };

        if let Some(obs) = observer.as_mut() {
            rec.clock.pause();
            obs(&IterationReport {
                k,
                gamma,
                certificate: &eta,
                selected: &selected,
                active: &merged,
                active_after: &next_active,
                objective_before_correction: objective_before,
                objective: problem.objective(&x)?,
                iterate: &x,
                lift: None,
                inner_iterations: outcome.iterations,
            });
            rec.clock.resume();
        }
        active = next_active;
        spectral_vector = next_vector;
    };

    Ok(SolveOutput {
        solution: x,
        trajectory: rec.finish(reason),
    })
}

pub(crate) fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
