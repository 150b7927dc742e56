use std::process::{Command, Output};

use serde_json::Value;

fn hmftrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmftrace")).args(args).output().expect("spawn hmftrace")
}

fn default_conf() -> String {
    format!("{}/../../configs/default.conf", env!("CARGO_MANIFEST_DIR"))
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn zeta_at_two_over_q_sqrt2() {
    let out = hmftrace(&["--config", &default_conf(), "zeta", "--s", "2", "--m", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let z = v["rows"][0]["value"]["re"].as_f64().unwrap();
    assert!((z - 5.7398).abs() < 1e-4, "{v}");
    assert_eq!(v["rows"][0]["value"]["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn unknown_command_is_usage_error() {
    assert_eq!(hmftrace(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hmftrace(&["verify", "--only", "13"]).status.code(), Some(2));
    assert_eq!(hmftrace(&["trace", "identity"]).status.code(), Some(2));
}

#[test]
fn bad_config_is_usage_error_with_json() {
    let dir = std::env::temp_dir().join(format!("hmftrace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.conf");
    std::fs::write(&path, "field = 2\nA = -1\n").unwrap();
    let out = hmftrace(&["--config", path.to_str().unwrap(), "field-info"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["message"].as_str().unwrap().contains("line 2"));
    assert_eq!(hmftrace(&["--set", "typo=1", "field-info"]).status.code(), Some(2));
}

#[test]
fn computation_error_exits_one() {
    let out = hmftrace(&["--set", "s=1.5", "trace", "parabolic"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "domain");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [vec!["field-info"], vec!["--format", "csv", "trace", "elliptic,mixed"], vec!["--set", "samples=5", "transforms"]] {
        let a = hmftrace(&args);
        let b = hmftrace(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_subset_and_output_file() {
    let path = std::env::temp_dir().join(format!("hmftrace-verify-{}.json", std::process::id()));
    let out = hmftrace(&["--config", &default_conf(), "--output", path.to_str().unwrap(), "verify", "--only", "2,9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("criterion  9: PASS"));
}

#[test]
fn thread_cap_is_validated() {
    let ok = Command::new(env!("CARGO_BIN_EXE_hmftrace")).env("HMFTRACE_THREADS", "1").arg("field-info").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_hmftrace")).env("HMFTRACE_THREADS", "zero").arg("field-info").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn shipped_config_is_canonical() {
    let text = std::fs::read_to_string(default_conf()).unwrap();
    let cfg = hmftrace::cli::parse_config(&text).unwrap();
    assert_eq!(cfg.to_text(), text);
}
