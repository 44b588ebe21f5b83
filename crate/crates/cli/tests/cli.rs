use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_degha"))
}

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(format!("{name}.json"))
}

#[test]
fn passing_run_exits_zero() {
    let out = bin().args(["analyze", "--model"]).arg(model("oscillator")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["command"], "analyze");
}

#[test]
fn failed_check_exits_one() {
    // The finite-difference residual is far above 1e-30.
    let out = bin()
        .args(["check-theorems", "--t-end", "0.5", "--tol-el", "1e-30", "--model"])
        .arg(model("oscillator"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"name": "bad", "m": 2, "a": [["1","2"],["0","0"]]}"#).unwrap();
    let out = bin().args(["analyze", "--model"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`a`"));
    let out = bin().args(["analyze", "--model", "/nonexistent.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate", "--t-end", "0.2", "--model"])
        .arg(model("oscillator"))
        .env("DEGHA_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report = std::fs::read_to_string(dir.path().join("oscillator-simulate.json")).unwrap();
    assert!(report.contains("\"command\": \"simulate\""));
    let mut rdr = csv::Reader::from_path(dir.path().join("oscillator-simulate.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["t", "q1", "q2", "p1", "p2", "constraint_norm"]);
    assert_eq!(rdr.records().count(), 201);
}

#[test]
fn zero_section_violation_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shifted.json");
    std::fs::write(&path, r#"{"name": "shifted", "m": 2, "a": [["1","0"],["0","0"]], "b": ["0", "3"]}"#).unwrap();
    let out = bin().args(["analyze", "--model"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero_section"));
}
