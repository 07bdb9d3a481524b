//! The four LASSO solvers and their shared building blocks.
//!
//! Every solver starts from `x = 0`, evaluates the dual certificate of its current
//! iterate, records a [`Sample`], and stops as soon as one of three conditions holds,
//! checked in this order:
//!
//! 1. the iterate passes the KKT test of [`kkt_satisfied`] at `config.kkt_tol`,
//! 2. `config.max_iter` iterations have been completed,
//! 3. the solver-owned work time exceeds `config.time_budget_s`.
//!
//! Work time excludes instrumentation (trajectory samples and observer callbacks).

mod atoms;
mod clock;
mod correction;
mod fcfw;
mod fista;
mod pfw;
mod vfw;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Certificate, LassoProblem, SparseIterate};

pub use atoms::{
    exact_line_search, polyatomic_indices, select_atom, step_size_schedule, Atom, LiftedIterate,
};
pub use correction::{partial_correction, partial_correction_with, CorrectionOutcome};
pub use fcfw::{fcfw_solve, fcfw_solve_observed};
pub use fista::{fista_solve, fista_solve_observed};
pub use pfw::{pfw_solve, pfw_solve_observed};
pub use vfw::{vfw_solve, vfw_solve_observed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Vfw,
    Fcfw,
    Pfw,
    Fista,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Vfw,
        SolverKind::Fcfw,
        SolverKind::Pfw,
        SolverKind::Fista,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Vfw => "vfw",
            SolverKind::Fcfw => "fcfw",
            SolverKind::Pfw => "pfw",
            SolverKind::Fista => "fista",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SolverKind::Vfw => "V-FW",
            SolverKind::Fcfw => "FC-FW",
            SolverKind::Pfw => "P-FW",
            SolverKind::Fista => "FISTA",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vfw" => Ok(SolverKind::Vfw),
            "fcfw" => Ok(SolverKind::Fcfw),
            "pfw" => Ok(SolverKind::Pfw),
            "fista" => Ok(SolverKind::Fista),
            _ => Err(Error::UnknownSolver(s.to_string())),
        }
    }
}

/// Tuning shared by all solvers. Fields that a solver does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Approximation quality δ of the polyatomic threshold `‖η‖_∞ − δγ_k`.
    pub delta: f64,
    /// Initial correction accuracy; iteration k uses `ε₀γ_k`.
    pub eps0: f64,
    pub max_iter: usize,
    pub time_budget_s: f64,
    /// Termination slack on `‖η‖_∞ ≤ 1`.
    pub kkt_tol: f64,
    /// Record one trajectory sample every this many iterations.
    pub record_every: usize,
    /// Drop active indices whose corrected weight is exactly zero.
    pub prune: bool,
    /// Fixed correction accuracy of the fully-corrective variant.
    pub eps_full: f64,
    /// Cap on ISTA iterations inside one correction.
    pub max_inner_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            delta: 1.5,
            eps0: 1e-2,
            max_iter: 1_000_000,
            time_budget_s: 4.0,
            kkt_tol: 1e-4,
            record_every: 1,
            prune: true,
            eps_full: 1e-6,
            max_inner_iter: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be >= 0, got {}", self.delta));
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return bad(format!("eps0 must be > 0, got {}", self.eps0));
        }
        if !(self.eps_full > 0.0) {
            return bad(format!("eps_full must be > 0, got {}", self.eps_full));
        }
        if !(self.kkt_tol > 0.0) {
            return bad(format!("kkt_tol must be > 0, got {}", self.kkt_tol));
        }
        if !(self.time_budget_s > 0.0) {
            return bad(format!(
                "time_budget_s must be > 0, got {}",
                self.time_budget_s
            ));
        }
        if self.max_iter == 0 || self.record_every == 0 || self.max_inner_iter == 0 {
            return bad("max_iter, record_every and max_inner_iter must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalReason {
    KktConverged,
    BudgetExhausted,
    MaxIter,
    /// The run returned an error; only produced by the benchmark harness.
    Failed,
}

impl TerminalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalReason::KktConverged => "kkt-converged",
            TerminalReason::BudgetExhausted => "budget-exhausted",
            TerminalReason::MaxIter => "max-iter",
            TerminalReason::Failed => "failed",
        }
    }
}

impl fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TerminalReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kkt-converged" => Ok(TerminalReason::KktConverged),
            "budget-exhausted" => Ok(TerminalReason::BudgetExhausted),
            "max-iter" => Ok(TerminalReason::MaxIter),
            "failed" => Ok(TerminalReason::Failed),
            _ => Err(Error::InvalidParameter(format!("unknown terminal reason `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Completed iterations; 0 is the starting point.
    pub k: usize,
    pub wall_time_s: f64,
    pub objective: f64,
    pub support_size: usize,
    pub certificate_linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminal_reason: TerminalReason,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn iterations(&self) -> usize {
        self.last().map_or(0, |s| s.k)
    }

    /// First work time at which the objective drops to `target` or below.
    pub fn time_to_reach(&self, target: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.objective <= target)
            .map(|s| s.wall_time_s)
    }
}

/// What a solver returns: the final iterate and its recorded trajectory.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub solution: SparseIterate,
    pub trajectory: Trajectory,
}

/// Per-iteration view handed to observers. Producing it is not timed.
#[derive(Debug)]
pub struct IterationReport<'a> {
    /// Index of the iteration that just completed (1-based).
    pub k: usize,
    pub gamma: f64,
    /// Certificate of the iterate this iteration started from.
    pub certificate: &'a Certificate,
    /// Indices selected by this iteration's linear subproblem (empty for FISTA
    /// and for the cone apex).
    pub selected: &'a [usize],
    /// Active set after the selected indices were merged, before pruning.
    pub active: &'a [usize],
    /// Active set carried into the next iteration.
    pub active_after: &'a [usize],
    /// Objective of the point handed to the correction step, when there is one.
    pub objective_before_correction: Option<f64>,
    pub objective: f64,
    pub iterate: &'a SparseIterate,
    /// Lift variable `t`, for the vanilla variant.
    pub lift: Option<f64>,
    pub inner_iterations: usize,
}

pub type Observer<'o> = &'o mut dyn FnMut(&IterationReport<'_>);

/// KKT test for `min ½‖y − Ax‖² + λ‖x‖₁` in certificate form:
/// `‖η‖_∞ ≤ 1 + tol` and `|ηᵢ − sgn(xᵢ)| ≤ 10·tol` on the support.
pub fn kkt_satisfied(certificate: &Certificate, support: &[usize], weights: &[f64], tol: f64) -> bool {
    if certificate.linf() > 1.0 + tol {
        return false;
    }
    let eta = certificate.values();
    support
        .iter()
        .zip(weights)
        .all(|(&i, &w)| (eta[i] - w.signum()).abs() <= 10.0 * tol)
}

pub fn solve(kind: SolverKind, problem: &LassoProblem, config: &SolverConfig) -> Result<SolveOutput> {
    match kind {
        SolverKind::Vfw => vfw_solve(problem, config),
        SolverKind::Fcfw => fcfw_solve(problem, config),
        SolverKind::Pfw => pfw_solve(problem, config),
        SolverKind::Fista => fista_solve(problem, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_names_round_trip() {
        for kind in SolverKind::ALL {
            assert_eq!(kind.name().parse::<SolverKind>().unwrap(), kind);
        }
        let err = "foo".parse::<SolverKind>().unwrap_err().to_string();
        assert!(err.contains("vfw, fcfw, pfw, fista"));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        for bad in [
            SolverConfig { delta: -1.0, ..Default::default() },
            SolverConfig { eps0: 0.0, ..Default::default() },
            SolverConfig { kkt_tol: 0.0, ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
            SolverConfig { time_budget_s: 0.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn config_json_fills_defaults() {
        let c: SolverConfig = serde_json::from_str(r#"{"delta": 0.5}"#).unwrap();
        assert_eq!(c.delta, 0.5);
        assert_eq!(c.eps0, SolverConfig::default().eps0);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"detla": 0.5}"#).is_err());
    }

    #[test]
    fn kkt_test_checks_support_signs() {
        let c = Certificate::from_values(vec![1.0, -0.5, 0.2]);
        assert!(kkt_satisfied(&c, &[0], &[2.0], 1e-6));
        assert!(!kkt_satisfied(&c, &[0], &[-2.0], 1e-6));
        assert!(!kkt_satisfied(&c, &[1], &[-1.0], 1e-3));
        let over = Certificate::from_values(vec![1.01]);
        assert!(!kkt_satisfied(&over, &[], &[], 1e-3));
    }
}
