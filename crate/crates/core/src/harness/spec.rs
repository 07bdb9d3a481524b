use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::{SolverConfig, SolverKind};

/// One cell of the benchmark grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n_features: usize,
    pub sparsity: usize,
    pub alpha: f64,
    #[serde(default = "defaults::psnr_db")]
    pub psnr_db: f64,
    #[serde(default = "defaults::lambda_factor")]
    pub lambda_factor: f64,
    #[serde(default = "defaults::n_trials")]
    pub n_trials: usize,
    #[serde(default = "defaults::budget_s")]
    pub budget_s: f64,
    #[serde(default = "defaults::solvers")]
    pub solvers: Vec<SolverKind>,
    /// Per-solver configuration; missing solvers use [`SolverConfig::default`].
    /// `time_budget_s` is always overridden by `budget_s`.
    #[serde(default)]
    pub configs: BTreeMap<SolverKind, SolverConfig>,
    #[serde(default)]
    pub base_seed: u64,
    /// Run independent trials concurrently. Waives timing fidelity.
    #[serde(default)]
    pub parallel_trials: bool,
}

pub(crate) mod defaults {
    use crate::solvers::SolverKind;

    pub fn psnr_db() -> f64 {
        20.0
    }
    pub fn lambda_factor() -> f64 {
        0.1
    }
    pub fn n_trials() -> usize {
        15
    }
    pub fn budget_s() -> f64 {
        4.0
    }
    pub fn solvers() -> Vec<SolverKind> {
        SolverKind::ALL.to_vec()
    }
}

impl ExperimentSpec {
    pub fn new(n_features: usize, sparsity: usize, alpha: f64) -> Self {
        Self {
            n_features,
            sparsity,
            alpha,
            psnr_db: defaults::psnr_db(),
            lambda_factor: defaults::lambda_factor(),
            n_trials: defaults::n_trials(),
            budget_s: defaults::budget_s(),
            solvers: defaults::solvers(),
            configs: BTreeMap::new(),
            base_seed: 0,
            parallel_trials: false,
        }
    }

    /// Number of measurements `L = round(αK)`.
    pub fn measurements(&self) -> usize {
        (self.alpha * self.sparsity as f64).round() as usize
    }

    pub fn cell_id(&self) -> String {
        format!("cell_K{}_a{}", self.sparsity, self.alpha)
    }

    pub fn seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    /// Resolved configuration of `solver`, with the cell budget applied.
    pub fn config_for(&self, solver: SolverKind) -> SolverConfig {
        let mut c = self.configs.get(&solver).cloned().unwrap_or_default();
        c.time_budget_s = self.budget_s;
        c
    }

    /// Materializes every solver configuration so that manifests show all defaults.
    pub fn resolved(&self) -> Self {
        let mut out = self.clone();
        out.configs = self
            .solvers
            .iter()
            .map(|&s| (s, self.config_for(s)))
            .collect();
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.sparsity < 1 {
            return bad("sparsity K must be at least 1".into());
        }
        if self.sparsity > self.n_features {
            return bad(format!(
                "sparsity K = {} exceeds n_features N = {}",
                self.sparsity, self.n_features
            ));
        }
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return bad(format!("oversampling alpha must be > 1, got {}", self.alpha));
        }
        let l = self.measurements();
        if l >= self.n_features {
            return bad(format!(
                "L = round(alpha*K) = {l} must be below N = {}",
                self.n_features
            ));
        }
        if !(self.lambda_factor > 0.0 && self.lambda_factor < 1.0) {
            return bad(format!(
                "lambda_factor must be in (0, 1), got {}",
                self.lambda_factor
            ));
        }
        if !self.psnr_db.is_finite() {
            return bad("psnr_db must be finite".into());
        }
        if self.n_trials < 1 {
            return bad("n_trials must be at least 1".into());
        }
        if !(self.budget_s > 0.0) {
            return bad(format!("budget_s must be positive, got {}", self.budget_s));
        }
        if self.solvers.is_empty() {
            return bad("solver list is empty".into());
        }
        for s in &self.solvers {
            self.config_for(*s)
                .validate()
                .map_err(|e| Error::InvalidSpec(format!("{s}: {e}")))?;
        }
        Ok(())
    }
}

/// A grid of cells sharing everything but `(K, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub n_features: usize,
    pub sparsity: Vec<usize>,
    pub alpha: Vec<f64>,
    #[serde(default = "defaults::psnr_db")]
    pub psnr_db: f64,
    #[serde(default = "defaults::lambda_factor")]
    pub lambda_factor: f64,
    #[serde(default = "defaults::n_trials")]
    pub n_trials: usize,
    #[serde(default = "defaults::budget_s")]
    pub budget_s: f64,
    #[serde(default = "defaults::solvers")]
    pub solvers: Vec<SolverKind>,
    #[serde(default)]
    pub configs: BTreeMap<SolverKind, SolverConfig>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub parallel_trials: bool,
}

impl BenchSpec {
    /// The six cells of the reference grid: N = 16384, K ∈ {32, 64, 128}, α ∈ {16, 64}.
    pub fn paper_grid() -> Self {
        Self {
            n_features: 16384,
            sparsity: vec![32, 64, 128],
            alpha: vec![16.0, 64.0],
            psnr_db: defaults::psnr_db(),
            lambda_factor: defaults::lambda_factor(),
            n_trials: defaults::n_trials(),
            budget_s: defaults::budget_s(),
            solvers: defaults::solvers(),
            configs: BTreeMap::new(),
            base_seed: 0,
            parallel_trials: false,
        }
    }

    /// Reference grid shrunk fourfold in N and K, so every `L/N` and `K/N` ratio is kept.
    pub fn scaled_grid() -> Self {
        Self {
            n_features: 4096,
            sparsity: vec![8, 16, 32],
            budget_s: 1.0,
            ..Self::paper_grid()
        }
    }

    /// Cells in `K`-major order.
    pub fn cells(&self) -> Vec<ExperimentSpec> {
        let mut out = Vec::new();
        for &k in &self.sparsity {
            for &alpha in &self.alpha {
                out.push(ExperimentSpec {
                    n_features: self.n_features,
                    sparsity: k,
                    alpha,
                    psnr_db: self.psnr_db,
                    lambda_factor: self.lambda_factor,
                    n_trials: self.n_trials,
                    budget_s: self.budget_s,
                    solvers: self.solvers.clone(),
                    configs: self.configs.clone(),
                    base_seed: self.base_seed,
                    parallel_trials: self.parallel_trials,
                });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.sparsity.is_empty() || self.alpha.is_empty() {
            return Err(Error::InvalidSpec("grid has no cells".into()));
        }
        self.cells().iter().try_for_each(ExperimentSpec::validate)
    }
}
