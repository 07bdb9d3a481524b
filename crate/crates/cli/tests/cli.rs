use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn polyfw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyfw"))
        .args(args)
        .env_remove("POLYFW_THREADS")
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// 2×2 identity with y = (2, −1).
fn identity_inputs(dir: &Path) -> (String, String) {
    fs::write(dir.join("a.csv"), "1,0\n0,1\n").unwrap();
    fs::write(dir.join("y.csv"), "2\n-1\n").unwrap();
    (p(&dir.join("a.csv")).into(), p(&dir.join("y.csv")).into())
}

fn solution_rows(dir: &Path) -> Vec<(usize, f64)> {
    let s = fs::read_to_string(dir.join("solution.csv")).unwrap();
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("index,weight"));
    lines
        .map(|l| {
            let (i, w) = l.split_once(',').unwrap();
            (i.parse().unwrap(), w.parse().unwrap())
        })
        .collect()
}

#[test]
fn identity_solve_matches_soft_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let (a, y) = identity_inputs(dir.path());
    let out = dir.path().join("out");
    let o = polyfw(&["solve", "--matrix", &a, "--y", &y, "--lambda", "1", "--solver", "pfw", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    // soft_threshold((2, −1), 1) = (1, 0).
    let expected: Vec<f64> = [2.0f64, -1.0].iter().map(|v| v.signum() * (v.abs() - 1.0).max(0.0)).collect();
    // Entries below the solver accuracy may remain off the true support.
    let mut dense = vec![0.0; 2];
    for (i, w) in solution_rows(&out) {
        dense[i] = w;
    }
    assert!(dense[0] != 0.0);
    for i in 0..2 {
        assert!((dense[i] - expected[i]).abs() <= 1e-6, "{dense:?}");
    }
    let stdout = text(&o.stdout);
    for key in ["objective", "certificate linf", "support size", "iterations", "wall time", "kkt-converged"] {
        assert!(stdout.contains(key), "missing {key} in\n{stdout}");
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"]["solver"], "pfw");
    for key in ["delta", "eps0", "kkt_tol", "record_every", "prune", "max_iter"] {
        assert!(!manifest["inputs"]["config"][key].is_null(), "{key} not materialized");
    }
}

#[test]
fn every_solver_is_selectable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, y) = identity_inputs(dir.path());
    for s in ["vfw", "fcfw", "pfw", "fista"] {
        let out = dir.path().join(s);
        let o = polyfw(&["solve", "--matrix", &a, "--y", &y, "--lambda", "1", "--solver", s, "--out", p(&out)]);
        assert_eq!(o.status.code(), Some(0), "{s}: {}", text(&o.stderr));
        let rows = solution_rows(&out);
        assert!(rows.iter().any(|&(i, w)| i == 0 && (w - 1.0).abs() <= 1e-3), "{s}: {rows:?}");
    }
}

#[test]
fn unknown_solver_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let (a, y) = identity_inputs(dir.path());
    let o = polyfw(&["solve", "--matrix", &a, "--y", &y, "--lambda", "1", "--solver", "foo"]);
    assert_eq!(o.status.code(), Some(1));
    let err = text(&o.stderr);
    for name in ["vfw", "fcfw", "pfw", "fista"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn lambda_above_max_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let (a, y) = identity_inputs(dir.path());
    // λ_max = ‖Aᵀy‖_∞ = 2, so factor 1.5 puts λ = 3 above it.
    let out = dir.path().join("out");
    let o = polyfw(&["solve", "--matrix", &a, "--y", &y, "--lambda-factor", "1.5", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert!(solution_rows(&out).is_empty());
}

#[test]
fn iteration_cap_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::new();
    for i in 0..6 {
        let r: Vec<String> = (0..12).map(|j| format!("{}", ((i * 12 + j) as f64 * 0.7).sin())).collect();
        rows.push_str(&r.join(","));
        rows.push('\n');
    }
    fs::write(dir.path().join("a.csv"), rows).unwrap();
    fs::write(dir.path().join("y.csv"), "1,-2,0.5,3,-1,2\n").unwrap();
    let out = dir.path().join("out");
    let o = polyfw(&[
        "solve", "--matrix", p(&dir.path().join("a.csv")), "--y", p(&dir.path().join("y.csv")),
        "--lambda-factor", "0.01", "--solver", "vfw", "--max-iter", "2", "--out", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o.stderr));
    assert!(text(&o.stdout).contains("max-iter"));
}

#[test]
fn input_errors_exit_with_one_and_distinct_messages() {
    let dir = tempfile::tempdir().unwrap();
    let (a, y) = identity_inputs(dir.path());
    fs::write(dir.path().join("y3.csv"), "1\n2\n3\n").unwrap();
    fs::write(dir.path().join("bad.csv"), "1,x\n0,1\n").unwrap();

    let mismatch = polyfw(&["solve", "--matrix", &a, "--y", p(&dir.path().join("y3.csv")), "--lambda", "1"]);
    let malformed = polyfw(&["solve", "--matrix", p(&dir.path().join("bad.csv")), "--y", &y, "--lambda", "1"]);
    let missing = polyfw(&["solve", "--matrix", p(&dir.path().join("none.csv")), "--y", &y, "--lambda", "1"]);
    let messages: Vec<String> = [&mismatch, &malformed, &missing]
        .iter()
        .map(|o| {
            assert_eq!(o.status.code(), Some(1));
            text(&o.stderr)
        })
        .collect();
    assert!(messages[1].contains("bad.csv"));
    assert!(messages[2].contains("none.csv"));
    assert!(messages[0] != messages[1] && messages[1] != messages[2] && messages[0] != messages[2]);
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (a, y) = identity_inputs(dir.path());
    let cfg = dir.path().join("solve.json");
    let body = serde_json::json!({
        "matrix": a, "y": y, "lambda": 1.0, "solver": "fista",
        "config": { "kkt_tol": 1e-9 }
    });
    fs::write(&cfg, body.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = polyfw(&["solve", "--config", p(&cfg), "--solver", "fcfw", "--delta", "0.5", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["inputs"]["solver"], "fcfw");
    assert_eq!(manifest["inputs"]["config"]["kkt_tol"], 1e-9);
    assert_eq!(manifest["inputs"]["config"]["delta"], 0.5);
}

fn smoke_spec(dir: &Path) -> String {
    let spec = serde_json::json!({
        "n_features": 256, "sparsity": [4, 8], "alpha": [4.0],
        "n_trials": 1, "budget_s": 0.5
    });
    let path = dir.join("smoke.json");
    fs::write(&path, spec.to_string()).unwrap();
    p(&path).into()
}

#[test]
fn bench_writes_cell_tree_and_replot_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = smoke_spec(dir.path());
    let results = dir.path().join("results");
    let o = polyfw(&["bench", "--config", &spec, "--out", p(&results), "--budget-s", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    for cell in ["cell_K4_a4", "cell_K8_a4"] {
        for f in ["raw.csv", "agg.csv", "manifest.json", "figure.svg"] {
            assert!(results.join(cell).join(f).is_file(), "{cell}/{f}");
        }
    }
    let stdout = text(&o.stdout);
    assert!(stdout.contains("cell_K4_a4") && stdout.contains("P-FW"), "{stdout}");
    assert!(results.join("summary.json").is_file());

    let cell = results.join("cell_K8_a4");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cell.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["spec"]["budget_s"], 0.2);
    assert_eq!(manifest["runs"].as_array().unwrap().len(), 4);

    let original = fs::read(cell.join("figure.svg")).unwrap();
    let replot = dir.path().join("again.svg");
    let o = polyfw(&["plot", p(&cell), "--out", p(&replot)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert_eq!(fs::read(&replot).unwrap(), original);

    // The whole tree re-renders in place.
    let o = polyfw(&["plot", p(&results)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(cell.join("figure.svg")).unwrap(), original);
}

#[test]
fn bench_reruns_a_cell_from_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("cell.json");
    let body = serde_json::json!({
        "n_features": 128, "sparsity": 4, "alpha": 4.0, "n_trials": 2, "budget_s": 30.0,
        "solvers": ["pfw", "fista"],
        "configs": { "pfw": { "max_iter": 40 }, "fista": { "max_iter": 40 } }
    });
    fs::write(&spec, body.to_string()).unwrap();
    let first = dir.path().join("first");
    let o = polyfw(&["bench", "--config", p(&spec), "--out", p(&first)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let manifest = first.join("cell_K4_a4").join("manifest.json");
    let second = dir.path().join("second");
    let o = polyfw(&["bench", "--config", p(&manifest), "--out", p(&second)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));

    let runs = |root: &Path| -> serde_json::Value {
        let m: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(root.join("cell_K4_a4").join("manifest.json")).unwrap(),
        )
        .unwrap();
        m["runs"].clone()
    };
    assert_eq!(runs(&first), runs(&second));
}

#[test]
fn bench_missing_spec_names_the_path() {
    let o = polyfw(&["bench", "--config", "/nonexistent/grid.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("/nonexistent/grid.json"));
}

#[test]
fn bench_rejects_invalid_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    // L = 64 ≥ N = 32.
    fs::write(&spec, r#"{"n_features": 32, "sparsity": [16], "alpha": [4.0]}"#).unwrap();
    let o = polyfw(&["bench", "--config", p(&spec), "--out", p(&dir.path().join("r"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plot_of_hand_written_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cell = dir.path().join("cell");
    fs::create_dir_all(&cell).unwrap();
    fs::write(
        cell.join("agg.csv"),
        "solver,time_s,median,p25,p75,count\npfw,0.1,10,10,10,1\npfw,1,1,1,1,1\n",
    )
    .unwrap();
    let o = polyfw(&["plot", p(&cell)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let svg = fs::read_to_string(cell.join("figure.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let line = doc
        .descendants()
        .find(|n| n.attribute("class") == Some("median"))
        .unwrap();
    assert_eq!(line.attribute("points").unwrap().split_whitespace().count(), 2);
}

#[test]
fn plot_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(polyfw(&["plot", p(dir.path())]).status.code(), Some(1));
    assert_eq!(polyfw(&["plot", p(&dir.path().join("missing"))]).status.code(), Some(1));
    let cell = dir.path().join("corrupt");
    fs::create_dir_all(&cell).unwrap();
    fs::write(cell.join("agg.csv"), "solver,time_s,median\npfw,a,b\n").unwrap();
    assert_eq!(polyfw(&["plot", p(&cell)]).status.code(), Some(1));
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_polyfw"))
        .args(["plot", "/nonexistent"])
        .env("POLYFW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("POLYFW_THREADS"));
}

#[test]
fn smoke_spec_finishes_within_a_minute() {
    let spec = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs/smoke.json");
    let dir = tempfile::tempdir().unwrap();
    let started = std::time::Instant::now();
    let o = polyfw(&["bench", "--config", p(&spec), "--out", p(dir.path())]);
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let figures = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().join("figure.svg").is_file())
        .count();
    assert_eq!(figures, 6);
    assert!(elapsed < 60.0, "{elapsed} s");
}

#[test]
fn shipped_grid_specs_match_builtin_grids() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    let read = |name: &str| -> polyfw::harness::BenchSpec {
        serde_json::from_str(&fs::read_to_string(root.join(name)).unwrap()).unwrap()
    };
    assert_eq!(read("paper.json"), polyfw::harness::BenchSpec::paper_grid());
    assert_eq!(read("scaled.json"), polyfw::harness::BenchSpec::scaled_grid());
    assert_eq!(polyfw::harness::BenchSpec::paper_grid().cells().len(), 6);
}
