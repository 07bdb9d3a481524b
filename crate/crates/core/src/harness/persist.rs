//! Result files of a benchmark cell.
//!
//! ```text
//! <out>/cell_K{K}_a{alpha}/raw.csv        every trajectory sample
//!                         /agg.csv        median / interquartile curves
//!                         /manifest.json  resolved spec, versions, run outcomes
//!                         /figure.svg
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::aggregate::AggregateCurve;
use super::generate::{PSNR_DEFINITION, RNG_NAME};
use super::run::RunRecord;
use super::spec::ExperimentSpec;
use super::summary::CellSummary;
use crate::error::{Error, Result};
use crate::solvers::{Sample, SolverKind, TerminalReason};

pub const RAW_HEADER: &str =
    "cell_id,solver,seed,k,wall_time_s,objective,support_size,certificate_linf";
pub const AGG_HEADER: &str = "solver,time_s,median,p25,p75,count";

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn cell_dir(out_dir: &Path, spec: &ExperimentSpec) -> PathBuf {
    out_dir.join(spec.cell_id())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub solver: SolverKind,
    pub seed: u64,
    pub terminal_reason: TerminalReason,
    pub iterations: usize,
    /// `None` when the run recorded no finite objective.
    pub final_objective: Option<f64>,
    pub final_support_size: usize,
    pub significant_support: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellManifest {
    pub library_version: String,
    pub rng: String,
    pub psnr_definition: String,
    pub objective: String,
    pub timing: String,
    pub spec: ExperimentSpec,
    pub runs: Vec<RunOutcome>,
    pub summary: Option<CellSummary>,
    pub plot_dropped_points: usize,
}

impl CellManifest {
    pub fn new(
        spec: &ExperimentSpec,
        records: &[RunRecord],
        summary: Option<CellSummary>,
        plot_dropped_points: usize,
    ) -> Self {
        Self {
            library_version: LIBRARY_VERSION.to_string(),
            rng: RNG_NAME.to_string(),
            psnr_definition: PSNR_DEFINITION.to_string(),
            objective: "0.5 * ||y - A x||_2^2 + lambda * ||x||_1".to_string(),
            timing: if spec.parallel_trials {
                "waived: trials ran concurrently".to_string()
            } else {
                "serialized: one timed run at a time; clock covers solver work only".to_string()
            },
            spec: spec.resolved(),
            runs: records
                .iter()
                .map(|r| RunOutcome {
                    solver: r.solver,
                    seed: r.seed,
                    terminal_reason: r.terminal_reason(),
                    iterations: r.trajectory.iterations(),
                    final_objective: r.final_objective.is_finite().then_some(r.final_objective),
                    final_support_size: r.final_support_size(),
                    significant_support: r.significant_support,
                    error: r.error.clone(),
                })
                .collect(),
            summary,
            plot_dropped_points,
        }
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_raw_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{RAW_HEADER}").map_err(io)?;
    for r in records {
        for s in &r.trajectory.samples {
            writeln!(
                w,
                "{},{},{},{},{:?},{:?},{},{:?}",
                r.cell_id, r.solver, r.seed, s.k, s.wall_time_s, s.objective, s.support_size,
                s.certificate_linf
            )
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn write_agg_csv(path: &Path, curves: &[AggregateCurve]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{AGG_HEADER}").map_err(io)?;
    for c in curves {
        for i in 0..c.time.len() {
            writeln!(
                w,
                "{},{:?},{:?},{:?},{:?},{}",
                c.solver, c.time[i], c.median[i], c.p25[i], c.p75[i], c.count[i]
            )
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn write_manifest(path: &Path, manifest: &CellManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<CellManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

/// Writes raw.csv, agg.csv and manifest.json into `dir`, creating it if needed.
pub fn persist(
    dir: &Path,
    spec: &ExperimentSpec,
    records: &[RunRecord],
    curves: &[AggregateCurve],
    summary: Option<CellSummary>,
    plot_dropped_points: usize,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_raw_csv(&dir.join("raw.csv"), records)?;
    write_agg_csv(&dir.join("agg.csv"), curves)?;
    let manifest = CellManifest::new(spec, records, summary, plot_dropped_points);
    write_manifest(&dir.join("manifest.json"), &manifest)
}

/// Samples of one (solver, seed) run as read back from raw.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRun {
    pub cell_id: String,
    pub solver: SolverKind,
    pub seed: u64,
    pub samples: Vec<Sample>,
}

fn check_header(path: &Path, reader: &mut csv::Reader<&[u8]>, expected: &str) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| Error::format(path, e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != expected {
        return Err(Error::format(
            path,
            format!("unexpected header `{header}`, expected `{expected}`"),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(path, format!("line {line}: bad field {}", i + 1)))
}

/// Runs in file order; consecutive rows with the same (solver, seed) form one run.
pub fn read_raw_csv(path: &Path) -> Result<Vec<RawRun>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    check_header(path, &mut reader, RAW_HEADER)?;
    let mut runs: Vec<RawRun> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::format(path, e.to_string()))?;
        let cell_id: String = field(path, &rec, 0, line)?;
        let solver: SolverKind = field(path, &rec, 1, line)?;
        let seed: u64 = field(path, &rec, 2, line)?;
        let sample = Sample {
            k: field(path, &rec, 3, line)?,
            wall_time_s: field(path, &rec, 4, line)?,
            objective: field(path, &rec, 5, line)?,
            support_size: field(path, &rec, 6, line)?,
            certificate_linf: field(path, &rec, 7, line)?,
        };
        match runs.last_mut() {
            Some(r) if r.solver == solver && r.seed == seed && r.cell_id == cell_id => {
                r.samples.push(sample)
            }
            _ => runs.push(RawRun {
                cell_id,
                solver,
                seed,
                samples: vec![sample],
            }),
        }
    }
    Ok(runs)
}

pub fn read_agg_csv(path: &Path) -> Result<Vec<AggregateCurve>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    check_header(path, &mut reader, AGG_HEADER)?;
    let mut curves: BTreeMap<SolverKind, AggregateCurve> = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::format(path, e.to_string()))?;
        let solver: SolverKind = field(path, &rec, 0, line)?;
        let c = curves.entry(solver).or_insert_with(|| AggregateCurve {
            solver,
            time: vec![],
            median: vec![],
            p25: vec![],
            p75: vec![],
            count: vec![],
        });
        c.time.push(field(path, &rec, 1, line)?);
        c.median.push(field(path, &rec, 2, line)?);
        c.p25.push(field(path, &rec, 3, line)?);
        c.p75.push(field(path, &rec, 4, line)?);
        c.count.push(field(path, &rec, 5, line)?);
    }
    Ok(curves.into_values().collect())
}
