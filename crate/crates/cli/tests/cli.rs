use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fbreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbreg")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn laplace() -> Value {
    json!({"kind": "laplace", "lambda0": 1.0, "lambda1": 1.0})
}

fn write_config(dir: &Path, name: &str, cfg: Value) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

fn config(dir: &Path, n_cells: usize, boundary: &str, checks: Value) -> Value {
    json!({
        "operator": laplace(),
        "grid": {"half_width": 1.0, "n_cells": n_cells},
        "boundary": boundary,
        "tol": 1e-9,
        "checks": checks,
        "output_dir": dir.join("out"),
    })
}

/// Solves and returns the snapshot path.
fn solve(dir: &Path, cfg: &Path) -> PathBuf {
    let out = fbreg(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("out/solution.csv")
}

fn printed(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")))
        .unwrap_or_else(|| panic!("no `{key}` line in {text}"))
        .to_string()
}

#[test]
fn zero_boundary_solves_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero", config(dir.path(), 16, "zero", json!([])));
    let csv = solve(dir.path(), &cfg);
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,u,active"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(cols[3], "0");
    }
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/solution.json")).unwrap()).unwrap();
    assert_eq!(sidecar["residual"].as_f64(), Some(0.0));
    assert_eq!(sidecar["grid"]["n_cells"], 16);
}

#[test]
fn radial_solve_meets_tolerance_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "radial",
        config(dir.path(), 128, "radial:r0=0.5", json!([{"name": "residual"}])),
    );
    let out = fbreg(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let solved = printed(&stdout(&out), "residual");
    assert!(solved.parse::<f64>().unwrap() <= 1e-9);

    let csv = dir.path().join("out/solution.csv");
    let out = fbreg(&["verify", "--config", cfg.to_str().unwrap(), "--solution", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(printed(&stdout(&out), "residual"), solved);
    // recomputed from the reloaded field, not just copied from the sidecar
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    let rec = &report[0]["values"];
    assert_eq!(rec["residual"].as_f64(), rec["recorded_residual"].as_f64());
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"operator\": ").unwrap();
    let out = fbreg(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = fbreg(&["solve", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let out = fbreg(&["solve", "--bogus-flag"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn non_convergence_exits_two_and_keeps_best_iterate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "radial", config(dir.path(), 64, "radial:r0=0.5", json!([])));
    let out = fbreg(&["solve", "--config", cfg.to_str().unwrap(), "--max-iters", "3"]);
    assert_eq!(code(&out), 2);
    assert!(dir.path().join("out/solution.csv").is_file());
    assert!(printed(&stdout(&out), "residual").parse::<f64>().unwrap() > 1e-9);
}

#[test]
fn halfspace_snapshot_passes_hard_checks() {
    let dir = tempfile::tempdir().unwrap();
    let checks = json!([
        {"name": "nondegeneracy"},
        {"name": "monotonicity"},
        {"name": "halfspace_fit", "params": {"r": 0.5}},
        {"name": "thickness", "params": {"points": [[0.0, 0.0]], "radii": [0.25]}}
    ]);
    let cfg = write_config(dir.path(), "half", config(dir.path(), 64, "halfspace:gamma=1,angle=0", checks));
    let csv = solve(dir.path(), &cfg);
    let out = fbreg(&["verify", "--config", cfg.to_str().unwrap(), "--solution", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("nondegeneracy"));

    let fit = std::fs::read_to_string(dir.path().join("out/report_halfspace_fit.csv")).unwrap();
    let row: Vec<f64> = fit.lines().nth(1).unwrap().split(',').filter_map(|c| c.parse().ok()).collect();
    // x, y, r, e_x, e_y, gamma, sup_err
    assert!((row[5] - 1.0).abs() < 1e-6, "{fit}");
    let nd = std::fs::read_to_string(dir.path().join("out/report_nondegeneracy.csv")).unwrap();
    assert!(nd.lines().count() > 10);
    assert!(nd.lines().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn zero_snapshot_fails_nondegeneracy() {
    let dir = tempfile::tempdir().unwrap();
    // r = 0.9 > 40h, so the slack 10hr no longer covers r²/4
    let checks = json!([{"name": "nondegeneracy", "params": {"points": [[0.0, 0.0]], "radii": [0.9]}}]);
    let cfg = write_config(dir.path(), "zero", config(dir.path(), 128, "zero", checks));
    let csv = solve(dir.path(), &cfg);
    let out = fbreg(&["verify", "--config", cfg.to_str().unwrap(), "--solution", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("FAIL"));
    let report = std::fs::read_to_string(dir.path().join("out/report_nondegeneracy.csv")).unwrap();
    assert!(report.lines().nth(1).unwrap().contains(",false,"));
}

#[test]
fn unknown_check_and_grid_mismatch_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero", config(dir.path(), 16, "zero", json!([])));
    let csv = solve(dir.path(), &cfg);
    let bad = write_config(dir.path(), "bad", config(dir.path(), 16, "zero", json!([{"name": "curvature"}])));
    let out = fbreg(&["verify", "--config", bad.to_str().unwrap(), "--solution", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown check `curvature`"));

    let out = fbreg(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--solution",
        csv.to_str().unwrap(),
        "--n-cells",
        "32",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let checks = json!([
        {"name": "projection", "params": {"center": [0.5, 0.0]}},
        {"name": "nondegeneracy"},
        {"name": "thickness", "params": {"points": [[0.5, 0.0]], "radii": [0.25, 0.125]}},
        {"name": "cone_barrier", "params": {"n_cells": 64}}
    ]);
    let cfg = write_config(dir.path(), "radial", config(dir.path(), 128, "radial:r0=0.5", checks));
    let csv = solve(dir.path(), &cfg);
    let mut reports = Vec::new();
    for (k, threads) in ["1", "4"].into_iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = Command::new(env!("CARGO_BIN_EXE_fbreg"))
            .env("FBREG_THREADS", threads)
            .args([
                "verify",
                "--config",
                cfg.to_str().unwrap(),
                "--solution",
                csv.to_str().unwrap(),
                "--output-dir",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(std::fs::read(out_dir.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn counterexample_tables() {
    let out = fbreg(&["counterexample"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,u_over_r2,density,bounded");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[5], "1/4096,971744202687/562949953421312,37449/16777216,true");

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let out = fbreg(&["counterexample", "--family", empty.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().skip(1).all(|l| l.contains(",0/1,0/1,")));

    let overlap = dir.path().join("overlap.json");
    std::fs::write(&overlap, "[[[1,4],[1,2]],[[1,8],[1,3]]]").unwrap();
    assert_eq!(code(&fbreg(&["counterexample", "--family", overlap.to_str().unwrap()])), 1);
    assert_eq!(code(&fbreg(&["counterexample", "--radii", "1/4,1/2"])), 1);
}

#[test]
fn props_and_blowup() {
    let out = fbreg(&["props", "--seed", "5", "--samples", "300"]);
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["samples"], 300);
    assert_eq!(rep["properties"].as_array().unwrap().len(), 6);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "half", config(dir.path(), 64, "halfspace:gamma=1,angle=0", json!([])));
    let csv = solve(dir.path(), &cfg);
    let field = dir.path().join("blow.csv");
    let out = fbreg(&[
        "blowup",
        "--solution",
        csv.to_str().unwrap(),
        "--x",
        "0",
        "--y",
        "-0.25",
        "--r",
        "0.5",
        "--output",
        field.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let fit: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((fit["gamma"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(std::fs::read_to_string(field).unwrap().starts_with("x,y,u\n"));
}
