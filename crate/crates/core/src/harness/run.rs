//! Racing the solvers on shared instances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_instance, GeneratedInstance};
use super::spec::ExperimentSpec;
use crate::error::Result;
use crate::solvers::{solve, Sample, SolverKind, TerminalReason, Trajectory};

/// One solver run on one trial instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell_id: String,
    pub sparsity: usize,
    pub alpha: f64,
    pub solver: SolverKind,
    pub seed: u64,
    /// Number of measurements of the instance.
    pub rows: usize,
    pub trajectory: Trajectory,
    pub final_objective: f64,
    /// Support of the returned solution.
    pub final_support: Vec<usize>,
    /// Number of returned weights with magnitude above 1e-9.
    pub significant_support: usize,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn final_support_size(&self) -> usize {
        self.final_support.len()
    }

    pub fn terminal_reason(&self) -> TerminalReason {
        self.trajectory.terminal_reason
    }
}

pub const SIGNIFICANT_WEIGHT: f64 = 1e-9;

/// Runs one solver on one instance and packages the outcome. Errors become a
/// `failed` record holding only the starting point.
pub fn run_solver(
    spec: &ExperimentSpec,
    instance: &GeneratedInstance,
    solver: SolverKind,
) -> RunRecord {
    let problem = &instance.problem;
    let config = spec.config_for(solver);
    let base = |trajectory: Trajectory| RunRecord {
        cell_id: spec.cell_id(),
        sparsity: spec.sparsity,
        alpha: spec.alpha,
        solver,
        seed: instance.seed,
        rows: problem.rows(),
        final_objective: trajectory.last().map_or(f64::NAN, |s| s.objective),
        trajectory,
        final_support: Vec::new(),
        significant_support: 0,
        error: None,
    };
    match solve(solver, problem, &config) {
        Ok(out) => {
            let mut rec = base(out.trajectory);
            rec.final_objective = problem
                .objective(&out.solution)
                .unwrap_or(rec.final_objective);
            rec.significant_support = out.solution.count_above(SIGNIFICANT_WEIGHT);
            rec.final_support = out.solution.support().to_vec();
            rec
        }
        Err(e) => {
            let start = 0.5 * problem.y().iter().map(|v| v * v).sum::<f64>();
            let mut rec = base(Trajectory {
                samples: vec![Sample {
                    k: 0,
                    wall_time_s: 0.0,
                    objective: start,
                    support_size: 0,
                    certificate_linf: problem.lambda_max() / problem.lambda(),
                }],
                terminal_reason: TerminalReason::Failed,
            });
            rec.error = Some(e.to_string());
            rec
        }
    }
}

fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<Vec<RunRecord>> {
    let instance = generate_instance(spec, spec.seed(trial))?;
    // Problem constants are shared by all solvers and computed before any clock starts.
    instance.problem.spectral_norm_sq();
    Ok(spec
        .solvers
        .iter()
        .map(|&s| run_solver(spec, &instance, s))
        .collect())
}

/// Every solver on every trial of the cell, in (trial, solver) order.
///
/// Timed runs are serialized unless `spec.parallel_trials` is set, in which case
/// whole trials run concurrently on the rayon pool.
pub fn run_cell(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let trials: Vec<Vec<RunRecord>> = if spec.parallel_trials {
        (0..spec.n_trials)
            .into_par_iter()
            .map(|t| run_trial(spec, t))
            .collect::<Result<_>>()?
    } else {
        (0..spec.n_trials)
            .map(|t| run_trial(spec, t))
            .collect::<Result<_>>()?
    };
    Ok(trials.into_iter().flatten().collect())
}
