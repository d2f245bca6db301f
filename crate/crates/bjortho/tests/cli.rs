use std::path::PathBuf;
use std::process::{Command, Output};

use bjortho::SuiteReport;

fn bjortho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bjortho")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn suite_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = bjortho(&["suite", "thm-sip-plus", "--domain", "lp:1", "--dim", "2", "--trials", "20", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: SuiteReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.summary.trials, 20);
    assert_eq!(report.config.codomain, bjortho_core::Norm::L1);
    assert_eq!(report.config.seed, 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("20 passed"));
}

#[test]
fn suite_without_out_prints_json() {
    let o = bjortho(&["suite", "example-counterexample"]);
    assert_eq!(code(&o), 0);
    let report: SuiteReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.summary.passed, 1);
}

#[test]
fn failing_suite_exits_one_and_replays() {
    // a tolerance far below the sampled-norm accuracy makes the l3 retrieval check fail
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = bjortho(&["suite", "thm-norm-retrieval-functional", "--trials", "3", "--tol", "1e-300", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let r = bjortho(&["replay", "--failure", out.to_str().unwrap()]);
    assert_eq!(code(&r), 1);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&bjortho(&["suite", "no-such-suite"])), 3);
    assert_eq!(code(&bjortho(&["suite", "thm-sip-plus", "--domain", "lp:0.5"])), 3);
    assert_eq!(code(&bjortho(&["suite", "thm-sip-plus", "--trials", "0"])), 3);
    assert_eq!(code(&bjortho(&["frobnicate"])), 3);
    assert_eq!(code(&bjortho(&["check-op", "--t", &fixture("counterexample_t.json")])), 3);
    assert_eq!(code(&bjortho(&["--help"])), 0);
}

#[test]
fn check_op_and_dist_on_fixtures() {
    let o = bjortho(&["check-op", "--t", &fixture("counterexample_t.json"), "--a", &fixture("counterexample_a1.json")]);
    assert_eq!(code(&o), 0);
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["verdict"], true);
    let o = bjortho(&["check-op", "--t", &fixture("counterexample_t.json"), "--a", &fixture("counterexample_a2.json")]);
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["verdict"], false);

    let o = bjortho(&["dist", "--t", &fixture("counterexample_t.json"), "--basis", &fixture("counterexample_a1.json"), &fixture("counterexample_a2.json")]);
    assert_eq!(code(&o), 0);
    let d: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((d["dist_min"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-6);

    let o = bjortho(&["check-op", "--t", &fixture("missing.json"), "--a", &fixture("counterexample_a1.json")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn counterexample_table_and_json() {
    let o = bjortho(&["counterexample"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("strict gap"));
    let o = bjortho(&["counterexample", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["strict_gap"].as_f64().unwrap() > 0.0);
}
