//! `polyfw`: solve a LASSO from files, run the benchmark grid, or re-plot results.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use polyfw::harness::persist::{read_agg_csv, read_manifest, LIBRARY_VERSION};
use polyfw::harness::plot::cell_title;
use polyfw::harness::{render_plot, run_and_persist_cell, BenchSpec, CellSummary, ExperimentSpec};
use polyfw::model::io::{read_matrix, read_vector};
use polyfw::solvers::{solve, SolverConfig, SolverKind, TerminalReason};
use polyfw::LassoProblem;

#[derive(Parser)]
#[command(name = "polyfw", version, about = "Polyatomic Frank-Wolfe LASSO solvers and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one LASSO problem read from matrix and observation files.
    Solve(SolveArgs),
    /// Run a benchmark grid and write raw data, aggregates, manifests and figures.
    Bench(BenchArgs),
    /// Re-render figures from persisted aggregate CSV files.
    Plot(PlotArgs),
}

/// Solver tuning flags shared by `solve` and `bench`.
#[derive(Args, Default)]
struct SolverFlags {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    budget_s: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Keep zero-weight indices in the active set.
    #[arg(long)]
    no_prune: bool,
}

impl SolverFlags {
    fn apply(&self, c: &mut SolverConfig) {
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = self.eps0 {
            c.eps0 = v;
        }
        if let Some(v) = self.budget_s {
            c.time_budget_s = v;
        }
        if let Some(v) = self.max_iter {
            c.max_iter = v;
        }
        if self.no_prune {
            c.prune = false;
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// JSON file with any of the fields of the resolved solve manifest.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Design matrix, CSV or PFW1 binary.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Observations, CSV or PFW1 binary.
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long, conflicts_with = "lambda_factor")]
    lambda: Option<f64>,
    /// λ as a fraction of ‖Aᵀy‖_∞.
    #[arg(long)]
    lambda_factor: Option<f64>,
    #[arg(long)]
    solver: Option<String>,
    /// Output directory for solution.csv and manifest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: SolverFlags,
}

/// Fully resolved `solve` inputs; also the config-file schema.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SolveConfig {
    matrix: Option<PathBuf>,
    y: Option<PathBuf>,
    lambda: Option<f64>,
    lambda_factor: Option<f64>,
    solver: Option<String>,
    out: Option<PathBuf>,
    config: SolverConfig,
}

#[derive(Serialize)]
struct SolveManifest<'a> {
    library_version: &'a str,
    inputs: &'a SolveConfig,
    lambda: f64,
    terminal_reason: TerminalReason,
    iterations: usize,
    objective: f64,
    certificate_linf: f64,
    support_size: usize,
    wall_time_s: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark spec (a grid or a single cell) or a cell manifest.json to re-run.
    #[arg(long, required_unless_present = "grid")]
    config: Option<PathBuf>,
    /// Built-in grid instead of a spec file.
    #[arg(long, value_parser = ["paper", "scaled"])]
    grid: Option<String>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Comma-separated solver names to race.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    lambda_factor: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Run trials concurrently; timing fidelity is waived and recorded as such.
    #[arg(long)]
    parallel_trials: bool,
    #[command(flatten)]
    flags: SolverFlags,
}

#[derive(Args)]
struct PlotArgs {
    /// A cell directory holding agg.csv, or a results directory of cells.
    dir: PathBuf,
    /// Output SVG; only valid for a single cell. Defaults to figure.svg in the cell.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Plot(a) => cmd_plot(a).map(|()| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("POLYFW_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("POLYFW_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    let mut cfg: SolveConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => SolveConfig::default(),
    };
    if a.matrix.is_some() {
        cfg.matrix = a.matrix;
    }
    if a.y.is_some() {
        cfg.y = a.y;
    }
    if a.lambda.is_some() {
        cfg.lambda = a.lambda;
        cfg.lambda_factor = None;
    }
    if a.lambda_factor.is_some() {
        cfg.lambda_factor = a.lambda_factor;
        cfg.lambda = None;
    }
    if a.solver.is_some() {
        cfg.solver = a.solver;
    }
    if a.out.is_some() {
        cfg.out = a.out;
    }
    a.flags.apply(&mut cfg.config);
    let solver: SolverKind = cfg.solver.get_or_insert_with(|| "pfw".into()).parse()?;
    cfg.config.validate()?;

    let matrix_path = cfg.matrix.clone().context("missing --matrix")?;
    let y_path = cfg.y.clone().context("missing --y")?;
    let matrix = read_matrix(&matrix_path)?;
    let y = read_vector(&y_path)?;
    let problem = match (cfg.lambda, cfg.lambda_factor) {
        (Some(l), None) => LassoProblem::new(matrix, y, l)?,
        (None, Some(f)) => LassoProblem::with_lambda_factor(matrix, y, f)?,
        (None, None) => bail!("one of --lambda or --lambda-factor is required"),
        (Some(_), Some(_)) => bail!("--lambda and --lambda-factor are mutually exclusive"),
    };

    problem.spectral_norm_sq();
    let started = Instant::now();
    let out = solve(solver, &problem, &cfg.config)?;
    let elapsed = started.elapsed().as_secs_f64();
    let last = *out.trajectory.last().context("solver recorded no samples")?;
    let linf = problem.dual_certificate(&out.solution)?.linf();

    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut csv = String::from("index,weight\n");
    for (i, w) in out.solution.iter() {
        csv.push_str(&format!("{i},{w:?}\n"));
    }
    let solution_path = out_dir.join("solution.csv");
    fs::write(&solution_path, csv).with_context(|| format!("writing {}", solution_path.display()))?;

    let manifest = SolveManifest {
        library_version: LIBRARY_VERSION,
        inputs: &cfg,
        lambda: problem.lambda(),
        terminal_reason: out.trajectory.terminal_reason,
        iterations: out.trajectory.iterations(),
        objective: last.objective,
        certificate_linf: linf,
        support_size: out.solution.nnz(),
        wall_time_s: last.wall_time_s,
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    println!("solver           {}", solver.label());
    println!("terminal reason  {}", out.trajectory.terminal_reason);
    println!("objective        {:.12e}", last.objective);
    println!("certificate linf {linf:.6}");
    println!("support size     {}", out.solution.nnz());
    println!("iterations       {}", out.trajectory.iterations());
    println!("work time (s)    {:.6}", last.wall_time_s);
    println!("wall time (s)    {elapsed:.6}");
    println!("solution         {}", solution_path.display());

    Ok(match out.trajectory.terminal_reason {
        TerminalReason::KktConverged => 0,
        TerminalReason::BudgetExhausted | TerminalReason::MaxIter => 2,
        TerminalReason::Failed => 1,
    })
}

/// Cells described by a spec file: a grid, a single cell, or a cell manifest.
fn load_cells(path: &Path) -> Result<Vec<ExperimentSpec>> {
    let value: serde_json::Value = read_json(path)?;
    let cells = if let Some(spec) = value.get("spec") {
        vec![serde_json::from_value(spec.clone())
            .with_context(|| format!("parsing the spec of manifest {}", path.display()))?]
    } else if value.get("sparsity").is_some_and(|v| v.is_array()) {
        let grid: BenchSpec = serde_json::from_value(value)
            .with_context(|| format!("parsing grid {}", path.display()))?;
        grid.validate()?;
        grid.cells()
    } else {
        vec![serde_json::from_value(value)
            .with_context(|| format!("parsing cell {}", path.display()))?]
    };
    Ok(cells)
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    let mut cells = match (&a.config, a.grid.as_deref()) {
        (Some(p), _) => load_cells(p)?,
        (None, Some("paper")) => BenchSpec::paper_grid().cells(),
        (None, _) => BenchSpec::scaled_grid().cells(),
    };
    let solvers: Option<Vec<SolverKind>> = a
        .solver
        .as_deref()
        .map(|s| s.split(',').map(|n| n.trim().parse()).collect())
        .transpose()?;
    for spec in &mut cells {
        if let Some(s) = &solvers {
            spec.solvers = s.clone();
        }
        if let Some(v) = a.lambda_factor {
            spec.lambda_factor = v;
        }
        if let Some(v) = a.seed {
            spec.base_seed = v;
        }
        if let Some(v) = a.trials {
            spec.n_trials = v;
        }
        if let Some(v) = a.flags.budget_s {
            spec.budget_s = v;
        }
        if a.parallel_trials {
            spec.parallel_trials = true;
        }
        for s in spec.solvers.clone() {
            let mut c = spec.config_for(s);
            a.flags.apply(&mut c);
            spec.configs.insert(s, c);
        }
        spec.validate()?;
    }

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut summaries: Vec<CellSummary> = Vec::new();
    let mut failed_cells = 0;
    for spec in &cells {
        let started = Instant::now();
        let result = match run_and_persist_cell(spec, &a.out) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{}: failed: {e}", spec.cell_id());
                failed_cells += 1;
                continue;
            }
        };
        let failed_runs = result.records.iter().filter(|r| r.error.is_some()).count();
        if failed_runs == result.records.len() && !result.records.is_empty() {
            failed_cells += 1;
        }
        eprintln!(
            "{}: {} runs ({} failed) in {:.1} s -> {}",
            spec.cell_id(),
            result.records.len(),
            failed_runs,
            started.elapsed().as_secs_f64(),
            result.dir.display()
        );
        summaries.push(result.summary);
    }

    print_summary_table(&summaries);
    let path = a.out.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summaries)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(if failed_cells > 0 { 1 } else { 0 })
}

fn print_summary_table(summaries: &[CellSummary]) {
    let Some(first) = summaries.first() else {
        return;
    };
    println!(
        "median time (s) to reach best-known objective within {:e} relative",
        first.rel_tol
    );
    let solvers: Vec<SolverKind> = first.solvers.iter().map(|s| s.solver).collect();
    print!("{:<18}", "cell");
    for s in &solvers {
        print!(" {:>10}", s.label());
    }
    println!();
    for cell in summaries {
        print!("{:<18}", cell.cell_id);
        for &s in &solvers {
            let t = cell.median_time(s);
            if t.is_finite() {
                print!(" {t:>10.4}");
            } else {
                print!(" {:>10}", "-");
            }
        }
        println!();
    }
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    if !a.dir.is_dir() {
        bail!("{} is not a directory", a.dir.display());
    }
    let cells: Vec<PathBuf> = if a.dir.join("agg.csv").is_file() {
        vec![a.dir.clone()]
    } else {
        let mut found: Vec<PathBuf> = fs::read_dir(&a.dir)
            .with_context(|| format!("listing {}", a.dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("agg.csv").is_file())
            .collect();
        found.sort();
        found
    };
    if cells.is_empty() {
        bail!("no agg.csv found in {}", a.dir.display());
    }
    if a.out.is_some() && cells.len() > 1 {
        bail!("--out needs a single cell directory, found {} cells", cells.len());
    }
    for cell in &cells {
        let curves = read_agg_csv(&cell.join("agg.csv"))?;
        let manifest_path = cell.join("manifest.json");
        let title = if manifest_path.is_file() {
            let m = read_manifest(&manifest_path)?;
            cell_title(m.spec.sparsity, m.spec.alpha)
        } else {
            cell.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        };
        let out = a.out.clone().unwrap_or_else(|| cell.join("figure.svg"));
        let dropped = render_plot(&curves, &title, &out)?;
        if dropped > 0 {
            eprintln!("{}: dropped {dropped} non-finite or non-positive points", out.display());
        }
        println!("{}", out.display());
    }
    Ok(())
}
