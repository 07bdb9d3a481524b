//! Time-to-target statistics of a cell.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::run::RunRecord;
use crate::solvers::{SolverKind, TerminalReason};

/// Relative objective gap used for time-to-target.
pub const TARGET_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub solver: SolverKind,
    pub trials: usize,
    /// Trials on which the target was reached.
    pub reached: usize,
    /// Median work time to the target; `None` when the median run never reached it.
    pub median_time_to_target_s: Option<f64>,
    pub median_final_objective: f64,
    pub kkt_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell_id: String,
    pub sparsity: usize,
    pub alpha: f64,
    pub rel_tol: f64,
    pub solvers: Vec<SolverSummary>,
    /// `median_time(other) / median_time(pfw)` for every other solver; `None` when
    /// either median is undefined.
    pub pfw_speedup: BTreeMap<SolverKind, Option<f64>>,
}

impl CellSummary {
    pub fn get(&self, solver: SolverKind) -> Option<&SolverSummary> {
        self.solvers.iter().find(|s| s.solver == solver)
    }

    /// Median time of `solver`, with "never reached" as +∞.
    pub fn median_time(&self, solver: SolverKind) -> f64 {
        self.get(solver)
            .and_then(|s| s.median_time_to_target_s)
            .unwrap_or(f64::INFINITY)
    }
}

/// Lowest objective any solver recorded on each trial seed.
pub fn best_known_objectives(records: &[RunRecord]) -> BTreeMap<u64, f64> {
    let mut best: BTreeMap<u64, f64> = BTreeMap::new();
    for r in records {
        let run_best = r
            .trajectory
            .samples
            .iter()
            .map(|s| s.objective)
            .chain(std::iter::once(r.final_objective))
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        let e = best.entry(r.seed).or_insert(f64::INFINITY);
        *e = e.min(run_best);
    }
    best
}

/// Median with +∞ entries sorting last; averages the middle pair on even counts.
pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn summarize(records: &[RunRecord], rel_tol: f64) -> CellSummary {
    let best = best_known_objectives(records);
    let mut by_solver: BTreeMap<SolverKind, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_solver.entry(r.solver).or_default().push(r);
    }
    let solvers: Vec<SolverSummary> = by_solver
        .iter()
        .map(|(&solver, runs)| {
            let mut times: Vec<f64> = runs
                .iter()
                .map(|r| {
                    let target = best[&r.seed] * (1.0 + rel_tol);
                    r.trajectory.time_to_reach(target).unwrap_or(f64::INFINITY)
                })
                .collect();
            let reached = times.iter().filter(|t| t.is_finite()).count();
            let med = median(&mut times);
            let mut finals: Vec<f64> = runs.iter().map(|r| r.final_objective).collect();
            SolverSummary {
                solver,
                trials: runs.len(),
                reached,
                median_time_to_target_s: med.is_finite().then_some(med),
                median_final_objective: median(&mut finals),
                kkt_converged: runs
                    .iter()
                    .filter(|r| r.terminal_reason() == TerminalReason::KktConverged)
                    .count(),
            }
        })
        .collect();

    let mut summary = CellSummary {
        cell_id: records.first().map(|r| r.cell_id.clone()).unwrap_or_default(),
        sparsity: records.first().map_or(0, |r| r.sparsity),
        alpha: records.first().map_or(0.0, |r| r.alpha),
        rel_tol,
        solvers,
        pfw_speedup: BTreeMap::new(),
    };
    if let Some(pfw) = summary.get(SolverKind::Pfw).and_then(|s| s.median_time_to_target_s) {
        let speedups = summary
            .solvers
            .iter()
            .filter(|s| s.solver != SolverKind::Pfw)
            .map(|s| {
                let ratio = s
                    .median_time_to_target_s
                    .filter(|_| pfw > 0.0)
                    .map(|t| t / pfw);
                (s.solver, ratio)
            })
            .collect();
        summary.pfw_speedup = speedups;
    }
    summary
}
