//! Vanilla Frank-Wolfe on the lifted cone with exact line search.

use super::atoms::{line_search_step, select_atom, Atom};
use super::clock::{stop_reason, Recorder};
use super::{kkt_satisfied, IterationReport, Observer, SolveOutput, SolverConfig};
use crate::error::Result;
use crate::model::{LassoProblem, SparseIterate};

pub fn vfw_solve(problem: &LassoProblem, config: &SolverConfig) -> Result<SolveOutput> {
    vfw_run(problem, config, None)
}

pub fn vfw_solve_observed(
    problem: &LassoProblem,
    config: &SolverConfig,
    observer: Observer<'_>,
) -> Result<SolveOutput> {
    vfw_run(problem, config, Some(observer))
}

fn vfw_run(
    problem: &LassoProblem,
    config: &SolverConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<SolveOutput> {
    config.validate()?;
    let n = problem.cols();
    let m = problem.lift_bound();
    let lambda = problem.lambda();
    let y = problem.y();

    let mut rec = Recorder::new(config.record_every);
    let mut x = vec![0.0; n];
    let mut t = 0.0;
    let mut forward = vec![0.0; problem.rows()];
    let mut residual = y.to_vec();
    let mut a_d = vec![0.0; problem.rows()];
    let mut k = 0;

    let reason = loop {
        for ((r, f), yi) in residual.iter_mut().zip(&forward).zip(y) {
            *r = yi - f;
        }
        let eta = problem.certificate_from_residual(&residual);
        let current = SparseIterate::from_dense(&x);
        let kkt = kkt_satisfied(&eta, current.support(), current.weights(), config.kkt_tol);
        let stop = stop_reason(kkt, k, config, &rec.clock);

        if rec.due(k) || stop.is_some() {
            rec.clock.pause();
            let objective = problem.objective_from_residual(&residual, current.l1_norm());
            rec.push(k, objective, current.nnz(), eta.linf());
            rec.clock.resume();
        }
        if let Some(reason) = stop {
            break reason;
        }

        k += 1;
        let atom = select_atom(&eta);
        let selected: Vec<usize>;
        match atom {
            Atom::Apex => {
                selected = Vec::new();
                for (d, f) in a_d.iter_mut().zip(&forward) {
                    *d = -f;
                }
            }
            Atom::Vertex { index, sign } => {
                selected = vec![index];
                let col = problem.matrix().column(index);
                for ((d, f), c) in a_d.iter_mut().zip(&forward).zip(col) {
                    *d = sign * m * c - f;
                }
            }
        }
        let t_s = atom.lift(m);
        let gamma = line_search_step(&a_d, &residual, lambda, t_s - t);

        x.iter_mut().for_each(|v| *v *= 1.0 - gamma);
        if let Atom::Vertex { index, sign } = atom {
            x[index] += gamma * sign * m;
        }
        t = (1.0 - gamma) * t + gamma * t_s;
        for (f, d) in forward.iter_mut().zip(&a_d) {
            *f += gamma * d;
        }

        if let Some(obs) = observer.as_mut() {
            rec.clock.pause();
            let iterate = SparseIterate::from_dense(&x);
            obs(&IterationReport {
                k,
                gamma,
                certificate: &eta,
                selected: &selected,
                active: iterate.support(),
                active_after: iterate.support(),
                objective_before_correction: None,
                objective: problem.objective(&iterate)?,
                iterate: &iterate,
                lift: Some(t),
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
