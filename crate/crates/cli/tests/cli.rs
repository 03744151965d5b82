use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn pdvg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdvg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_bundled_scenarios() {
    for name in [
        "scenario1.toml",
        "scenario2.toml",
        "scenario3.toml",
        "gauntlet.toml",
        "validation.toml",
        "clear_field.toml",
    ] {
        let o = pdvg(&["validate", scenario(name).to_str().unwrap()]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn plan_clear_field_writes_two_waypoints() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdvg(&[
        "--quiet",
        "--out",
        dir.path().to_str().unwrap(),
        "plan",
        scenario("clear_field.toml").to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let wp = std::fs::read_to_string(dir.path().join("waypoints.csv")).unwrap();
    let lines: Vec<&str> = wp.lines().collect();
    assert_eq!(lines[0], "n_m,e_m");
    assert_eq!(lines.len() - 1, 2);
    for f in ["trajectory.csv", "detection.csv", "plan_log.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let log: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan_log.json")).unwrap())
            .unwrap();
    assert_eq!(log["status"], "valid");
    assert_eq!(log["iterations"], 1);
}

#[test]
fn budget_has_one_row_per_source_plus_total() {
    let o = pdvg(&[
        "--quiet",
        "budget",
        scenario("scenario1.toml").to_str().unwrap(),
        "--at",
        "15120",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), pdvg::lincov::Source::ALL.len() + 1);
    assert!(rows.last().unwrap().starts_with("total,"));
}

#[test]
fn evaluate_round_trips_planner_waypoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let s = scenario("clear_field.toml");
    assert!(pdvg(&["-q", "--out", out, "plan", s.to_str().unwrap()])
        .status
        .success());
    let wp = dir.path().join("waypoints.csv");
    let o = pdvg(&["-q", "evaluate", s.to_str().unwrap(), wp.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("radar_id,t_s,pd_nominal_prob,sigma_pd_prob,violation_flag\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn montecarlo_small_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pdvg(&[
        "-q",
        "--out",
        out,
        "--dt",
        "5",
        "montecarlo",
        scenario("clear_field.toml").to_str().unwrap(),
        "-n",
        "4",
        "--seed",
        "11",
        "--traces",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("ensemble.csv")).unwrap();
    assert!(csv.starts_with("radar_id,t_s,pd_nominal_prob,mean_error_prob,sigma_error_prob\n"));
    let traces = std::fs::read_to_string(dir.path().join("ensemble_traces.csv")).unwrap();
    assert!(traces.lines().next().unwrap().ends_with("run3_error_prob"));
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[mission]\nstart_km = [0.0, 0.0]\n").unwrap();
    assert_eq!(
        pdvg(&["validate", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let inside = dir.path().join("inside.toml");
    let text = std::fs::read_to_string(scenario("clear_field.toml"))
        .unwrap()
        .replace("[2000.0, 0.0, 0.0]", "[100.0, 0.0, 0.0]");
    std::fs::write(&inside, text).unwrap();
    assert_eq!(
        pdvg(&["validate", inside.to_str().unwrap()]).status.code(),
        Some(3)
    );

    let late = pdvg(&[
        "budget",
        scenario("clear_field.toml").to_str().unwrap(),
        "--at",
        "1e6",
    ]);
    assert_eq!(late.status.code(), Some(2));

    assert_ne!(pdvg(&["frobnicate"]).status.code(), Some(0));
    assert_ne!(pdvg(&["validate", "--bogus", "x"]).status.code(), Some(0));
    assert_eq!(
        pdvg(&["validate", "/nonexistent/file.toml"]).status.code(),
        Some(1)
    );
}

#[test]
fn worker_override_is_accepted() {
    let o = Command::new(env!("CARGO_BIN_EXE_pdvg"))
        .env("PDVG_WORKERS", "1")
        .args([
            "-q",
            "validate",
            scenario("clear_field.toml").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_pdvg"))
        .env("PDVG_WORKERS", "many")
        .args([
            "-q",
            "validate",
            scenario("clear_field.toml").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
