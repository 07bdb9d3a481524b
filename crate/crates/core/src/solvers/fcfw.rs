//! Fully-corrective Frank-Wolfe: one atom per iteration, then a tight restricted solve.

use super::atoms::{select_atom, step_size_schedule, Atom};
use super::clock::{stop_reason, Recorder};
use super::correction::{correct, CorrectionLimits};
use super::{kkt_satisfied, IterationReport, Observer, SolveOutput, SolverConfig};
use crate::error::Result;
use crate::model::{LassoProblem, SparseIterate};

pub fn fcfw_solve(problem: &LassoProblem, config: &SolverConfig) -> Result<SolveOutput> {
    fcfw_run(problem, config, None)
}

pub fn fcfw_solve_observed(
    problem: &LassoProblem,
    config: &SolverConfig,
    observer: Observer<'_>,
) -> Result<SolveOutput> {
    fcfw_run(problem, config, Some(observer))
}

fn fcfw_run(
    problem: &LassoProblem,
    config: &SolverConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<SolveOutput> {
    config.validate()?;
    let n = problem.cols();
    let y = problem.y();

    let mut rec = Recorder::new(config.record_every);
    let mut x = SparseIterate::zeros(n);
    let mut forward = vec![0.0; problem.rows()];
    let mut residual = y.to_vec();
    let mut active: Vec<usize> = Vec::new();
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
        let selected: Vec<usize> = match select_atom(&eta) {
            Atom::Vertex { index, .. } => vec![index],
            Atom::Apex => Vec::new(),
        };
        let mut merged = active.clone();
        let mut warm = spectral_vector.clone();
        for &j in &selected {
            if let Err(pos) = merged.binary_search(&j) {
                merged.insert(pos, j);
                warm.insert(pos, 0.0);
            }
        }
        let init: Vec<f64> = merged.iter().map(|&j| x.get(j)).collect();
        let objective_before = if observer.is_some() {
            rec.clock.pause();
            let value = problem.objective(&x)?;
            rec.clock.resume();
            Some(value)
        } else {
            None
        };

        let outcome = correct(
            problem,
            &merged,
            init,
            config.eps_full,
            CorrectionLimits {
                max_iter: Some(config.max_inner_iter),
                spectral_init: Some(&warm),
                deadline: Some((&rec.clock, config.time_budget_s)),
            },
        );
        x = SparseIterate::from_parts_dropping_zeros(n, &merged, &outcome.weights);
        forward = outcome.forward;

        let (next_active, next_vector): (Vec<usize>, Vec<f64>) = if config.prune {
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
                gamma: step_size_schedule(k),
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
