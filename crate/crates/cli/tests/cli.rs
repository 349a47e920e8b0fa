use std::path::Path;
use std::process::{Command, Output};

use sfw_cli::csv_body;

fn sfw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfw")).args(args).output().unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sweep_bodies_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for threads in ["1", "4", "8"] {
        let out = dir.path().join(format!("sweep{threads}.csv"));
        let o = sfw(&[
            "sweep", "--axis", "lambda_f", "--start", "0", "--stop", "0.08", "--step", "0.02",
            "--trials", "20", "--window-size", "50", "--seed", "9", "--threads", threads,
            "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = read(&out);
        assert!(text.starts_with("# sfw "));
        bodies.push(csv_body(&text));
    }
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[0], bodies[2]);
    let lines: Vec<&str> = bodies[0].lines().collect();
    assert_eq!(lines[0], sfw_cli::SWEEP_HEADER);
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0.8,2,0,2,50,20,"));
}

#[test]
fn critical_writes_companion_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("crit.csv");
    let o = sfw(&[
        "critical", "--trials", "20", "--window-size", "50", "--search-step", "0.01",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let main = csv_body(&read(&out));
    assert!(main.starts_with(sfw_cli::CRITICAL_HEADER));
    let row: Vec<f64> = main.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!(row[1] > 0.0 && row[1] < 0.18);

    let upper = csv_body(&read(&dir.path().join("crit.upper_bounds.csv")));
    assert!(upper.contains("1.44,2,2,0.12"));
    assert!(upper.contains("3.37,2,2,"));
    let grid = csv_body(&read(&dir.path().join("crit.grid.csv")));
    assert!(grid.lines().count() > 3);
}

#[test]
fn exhausted_search_keeps_partial_grid_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("crit.csv");
    let o = sfw(&[
        "critical", "--lambda-r", "3", "--trials", "10", "--window-size", "40", "--search-step", "0.01",
        "--lambda-f-max", "0.02", "--out", out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("search exhausted"));
    let grid = csv_body(&read(&dir.path().join("crit.grid.csv")));
    assert_eq!(grid.lines().count(), 4);
}

#[test]
fn bounds_json_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let o = sfw(&["bounds", "--lambda-f", "0.05", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(v["critical_upper_bound"].as_f64().unwrap(), 0.12);
    assert_eq!(v["supercritical_vacuous"], serde_json::Value::Bool(true));
    assert!(String::from_utf8_lossy(&o.stdout).contains("critical protected fraction"));

    let o = sfw(&["bounds", "--lc1", "3.37"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.280"));
}

#[test]
fn protected_reports_analytic_column() {
    let o = sfw(&["protected", "--lambda-f", "0.05", "--trials", "20", "--window-size", "50"]);
    assert!(o.status.success());
    let body = csv_body(&String::from_utf8(o.stdout).unwrap());
    let row: Vec<&str> = body.lines().nth(1).unwrap().split(',').collect();
    // margin defaults to r_f
    assert_eq!(row[3], "2");
    let analytic: f64 = row[7].parse().unwrap();
    assert!((analytic - (1.0 - (-std::f64::consts::PI * 0.05 * 4.0).exp())).abs() < 1e-12);
}

#[test]
fn validate_passes() {
    let o = sfw(&["validate", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let body = csv_body(&String::from_utf8(o.stdout).unwrap());
    assert!(body.starts_with("check_name,trials,violations,details"));
    assert!(body.lines().skip(1).all(|l| l.split(',').nth(2) == Some("0")));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.json");
    std::fs::write(
        &cfg,
        r#"{"command": "sweep", "network": {"lambda_r": 0.5, "r_r": 2, "lambda_f": 0, "r_f": 2, "window_size": 30}, "trials": 5}"#,
    )
    .unwrap();
    let o = sfw(&["sweep", "--config", cfg.to_str().unwrap(), "--trials", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let body = csv_body(&String::from_utf8(o.stdout).unwrap());
    assert!(body.lines().nth(1).unwrap().starts_with("0.5,2,0,2,30,7,"));
}

#[test]
fn bad_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n \"command\": \"sweep\",\n \"trials\": -1\n}").unwrap();
    let o = sfw(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = sfw(&["sweep", "--r-f", "1"]);
    assert!(!o.status.success());
    let o = sfw(&["sweep", "--axis", "lambda_f"]);
    assert!(!o.status.success());
    let o = sfw(&["bounds", "--config", cfg.to_str().unwrap().replace("bad", "missing").as_str()]);
    assert!(!o.status.success());
}
