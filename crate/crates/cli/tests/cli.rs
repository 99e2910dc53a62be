use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn trf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trf"))
        .args(args)
        .env_remove("TRF_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Deterministic synthetic series: y depends on x1 and x2 only.
fn write_data(dir: &Path) -> PathBuf {
    let path = dir.join("data.csv");
    let mut text = String::from("date,y,x1,x2,x3,x4,x5,x6\n");
    for t in 0..80u32 {
        let x: Vec<f64> = (1..=6).map(|j| ((t * 7 + j * 13) % 17) as f64 / 17.0 + (t as f64 * 0.37 * j as f64).sin() * 0.1).collect();
        let y = 2.0 * x[0] - x[1] + 0.05 * (t as f64 * 1.3).cos();
        let cells: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        text.push_str(&format!("t{t},{y},{}\n", cells.join(",")));
    }
    fs::write(&path, text).unwrap();
    path
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn assert_reproducible(args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out_str = out.to_str().unwrap().to_string();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out-dir", &out_str]);
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let o = trf(&full);
        assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
        outputs.push(read_dir_sorted(&out));
        fs::remove_dir_all(&out).unwrap();
    }
    assert_eq!(outputs[0], outputs[1], "outputs differ across identical runs of {args:?}");
    outputs.pop().unwrap()
}

#[test]
fn help_lists_subcommands() {
    let o = trf(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for sub in ["theory", "sim", "targets", "fit", "forecast", "diagnose"] {
        assert!(text.contains(sub), "help is missing {sub}");
    }
}

#[test]
fn theory_bounds_prints_hypergeometric_value() {
    let o = trf(&["theory", "bounds", "--a", "40", "--s", "5", "--m", "14"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.900");
    let echo = String::from_utf8_lossy(&o.stderr);
    let cfg: serde_json::Value = serde_json::from_str(echo.lines().next().unwrap()).unwrap();
    assert_eq!(cfg["settings"]["a"], 40);
}

#[test]
fn constant_tree_mse_is_unit_variance() {
    let o = trf(&["theory", "mse", "--L", "1", "--beta1", "3.4641"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1.000");
}

#[test]
fn theory_json_output() {
    let o = trf(&["theory", "cstar", "--dgp", "linear", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["cstar"].as_f64().unwrap() - 0.75).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(trf(&["bogus"]).status.code(), Some(2));
    assert_eq!(trf(&["theory", "bounds", "--a", "40"]).status.code(), Some(2));
    // stochastic subcommand without a seed
    assert_eq!(trf(&["sim", "rho", "--grid-file", "grid.csv"]).status.code(), Some(2));
    assert_eq!(trf(&["theory", "cstar", "--dgp", "cubic"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    let o = trf(&["targets", "--csv", "/nonexistent/data.csv", "--response", "y", "--sprime", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = trf(&["theory", "bounds", "--a", "4", "--s", "5", "--m", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_fills_missing_flags_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"a": 40, "s": 5, "m": 14, "digits": 5}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let o = trf(&["theory", "bounds", "--config", c]);
    assert_eq!(stdout(&o).trim(), "0.90003");
    let o = trf(&["theory", "bounds", "--config", c, "--digits", "2"]);
    assert_eq!(stdout(&o).trim(), "0.90");
}

#[test]
fn sim_rho_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = tmp.path().join("grid.csv");
    fs::write(&grid, "kind,alpha,p,n,snr\nlinear,,2,50,0.5\nsine,12.566370614359172,4,40,0.3\n").unwrap();
    let files = assert_reproducible(&["sim", "rho", "--grid-file", grid.to_str().unwrap(), "--reps", "200", "--seed", "5"]);
    let csv = files.iter().find(|f| f.0 == "rho.csv").expect("rho.csv");
    assert_eq!(String::from_utf8_lossy(&csv.1).lines().count(), 3);
}

#[test]
fn targets_selects_signal_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data(tmp.path());
    let o = trf(&[
        "targets", "--csv", data.to_str().unwrap(), "--response", "y", "--time-column", "date", "--sprime", "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(names, ["x1", "x2"]);
}

#[test]
fn fit_forecast_diagnose_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data(tmp.path());
    let d = data.to_str().unwrap();
    let common = ["--csv", d, "--response", "y", "--time-column", "date", "--trees", "20", "--seed", "11"];

    let mut fit = vec!["fit", "--sprime", "3"];
    fit.extend(common);
    let files = assert_reproducible(&fit);
    assert!(files.iter().any(|f| f.0 == "model.json"));

    let mut fc = vec!["forecast", "--h", "1", "--initial", "70", "--methods", "rf,trf:2,trf:6"];
    fc.extend(common);
    let files = assert_reproducible(&fc);
    let summary = files.iter().find(|f| f.0 == "summary.json").expect("summary");
    let s: serde_json::Value = serde_json::from_slice(&summary.1).unwrap();
    assert_eq!(s["windows"], 10);
    // s' = p shares seeds with rf and reproduces it exactly
    assert_eq!(s["comparisons"][1]["mse_ratio"], 1.0);

    let mut dg = vec!["diagnose", "--sprime-grid", "1,3,6", "--format", "json"];
    dg.extend(common);
    let files = assert_reproducible(&dg);
    let curve = files.iter().find(|f| f.0 == "diagnostics.json").expect("diagnostics");
    let v: serde_json::Value = serde_json::from_slice(&curve.1).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}
