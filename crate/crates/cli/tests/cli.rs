use std::path::Path;
use std::process::{Command, Output};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strominger-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = verify(&["check", "--suite", "balanced", "--points", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let b = &r["suites"]["balanced"];
    assert_eq!(b["pass"], true);
    assert_eq!(b["points"], 20);
    assert!(r["config_digest"].as_str().unwrap().len() == 64);
    assert!(r["version"].is_string());
}

#[test]
fn failing_run_lists_worst_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"suite": "anomaly", "g": "1.0", "alpha_prime": 2.0}"#);
    let out = dir.path().join("r.json");
    let o = verify(&["check", "--config", &cfg, "--points", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let a = &r["suites"]["anomaly"];
    assert_eq!(a["pass"], false);
    assert!(a["max"].as_f64().unwrap() >= 1e-3);
    assert_eq!(a["worst_points"].as_array().unwrap().len(), 10);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "u.json", r#"{"sampling": {"count": 5, "colour": 1}}"#);
    assert_eq!(verify(&["check", "--config", &unknown]).status.code(), Some(2));
    let eh = write_config(dir.path(), "eh.json", r#"{"model": {"model": "eguchi_hanson", "a": 1.0}}"#);
    assert_eq!(verify(&["check", "--config", &eh, "--suite", "hym"]).status.code(), Some(2));
    let o = verify(&["check", "--suite", "balanced", "--points", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write_config(dir.path(), "b.json", r#"{"h": "log("}"#);
    let o = verify(&["check", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 4"));
}

#[test]
fn unwritable_path_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("r.json");
    let o = verify(&["check", "--suite", "balanced", "--points", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn report_is_byte_identical_across_runs_and_threads() {
    let args = ["report", "--suite", "all", "--points", "15", "--seed", "7"];
    let a = verify(&[&args[..], &["--threads", "1"]].concat());
    let b = verify(&[&args[..], &["--threads", "4"]].concat());
    let c = verify(&[&args[..], &["--threads", "4"]].concat());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn validate_model_on_eguchi_hanson() {
    let dir = tempfile::tempdir().unwrap();
    let eh = write_config(dir.path(), "eh.json", r#"{"model": {"model": "eguchi_hanson", "a": 1.0}}"#);
    let o = verify(&["validate-model", "--config", &eh, "--points", "25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("hyperkahler.asd"));
    assert!(text.contains("hyperkahler.det"));
}
