//! Compressed-sensing benchmark: instance generation, timed solver races,
//! aggregation, persistence and plotting.

pub mod aggregate;
pub mod generate;
pub mod persist;
pub mod plot;
pub mod run;
pub mod spec;
pub mod summary;

use std::path::{Path, PathBuf};

pub use aggregate::{aggregate, AggregateCurve};
pub use generate::{generate_instance, GeneratedInstance};
pub use persist::{cell_dir, persist, CellManifest};
pub use plot::render_plot;
pub use run::{run_cell, RunRecord};
pub use spec::{BenchSpec, ExperimentSpec};
pub use summary::{summarize, CellSummary, TARGET_REL_TOL};

use crate::error::Result;

/// Grid resolution of persisted aggregate curves.
pub const GRID_POINTS: usize = 200;

#[derive(Debug, Clone)]
pub struct CellResult {
    pub spec: ExperimentSpec,
    pub dir: PathBuf,
    pub records: Vec<RunRecord>,
    pub curves: Vec<AggregateCurve>,
    pub summary: CellSummary,
}

/// Runs, aggregates, plots and persists one cell under `out_dir`.
pub fn run_and_persist_cell(spec: &ExperimentSpec, out_dir: &Path) -> Result<CellResult> {
    let records = run_cell(spec)?;
    let curves = aggregate(&records, GRID_POINTS, spec.budget_s)?;
    let summary = summarize(&records, TARGET_REL_TOL);
    let dir = cell_dir(out_dir, spec);
    std::fs::create_dir_all(&dir).map_err(|e| crate::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let dropped = render_plot(
        &curves,
        &plot::cell_title(spec.sparsity, spec.alpha),
        &dir.join("figure.svg"),
    )?;
    persist(&dir, spec, &records, &curves, Some(summary.clone()), dropped)?;
    Ok(CellResult {
        spec: spec.clone(),
        dir,
        records,
        curves,
        summary,
    })
}
