use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_payne-quad"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("runs")
}

fn config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: stdout {:?} stderr {:?}", out.stdout, String::from_utf8_lossy(&out.stderr))
    })
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

const BROKEN: &str = r#"{"variant": "C2even", "field": "2^3", "f": [0, 1, 0], "validate": false}"#;

#[test]
fn quad_q9_payne() {
    let out = run(&["quad", "--field", "3^2", "--payne"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["passed"], true);
    assert_eq!(r["result"]["payne"]["points"], 729);
    assert_eq!(r["result"]["payne"]["s"], 8);
    assert_eq!(r["result"]["payne"]["t"], 10);
    assert_eq!(r["result"]["wq"]["points"], 820);
    assert!(r["modulus"].is_array());
}

#[test]
fn broken_spec_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "bad.json", BROKEN);
    let out = run(&["check", "--config", cfg.to_str().unwrap(), "--exhaustive"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["passed"], false);
    assert!(r["result"]["witness"]["first"].is_string());
    assert!(r["result"]["witness"]["second"].is_string());
}

#[test]
fn validated_build_rejects_the_broken_tuple() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "bad.json", &BROKEN.replace(r#", "validate": false"#, ""));
    let out = run(&["build", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let cfg = config(dir.path(), "typo.json", r#"{"variant": "S2", "field": "3^3", "mu_c": 1}"#);
    assert_eq!(run(&["build", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let cfg = config(dir.path(), "field.json", r#"{"variant": "S2", "field": "3^4"}"#);
    assert_eq!(run(&["build", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["build", "--config", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--preset", "nope"]).status.code(), Some(2));
}

#[test]
fn caps_exit_3() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "s2.json", r#"{"variant": "S2", "field": "3^3", "S1": "X^3"}"#);
    let out = run(&["check", "--config", cfg.to_str().unwrap(), "--exhaustive"]);
    assert_eq!(out.status.code(), Some(3));
    let out = bin()
        .args(["quad", "--field", "3^2"])
        .env("PAYNE_QUAD_POINT_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin()
        .args(["quad", "--field", "3^2"])
        .env("PAYNE_QUAD_POINT_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "s3.json", r#"{"variant": "S3", "field": "3^3", "S1": "X^3 + X^9"}"#);
    let cfg = cfg.to_str().unwrap();
    let a = run(&["--threads", "1", "check", "--config", cfg, "--mode", "sample:20000:9"]);
    let b = run(&["--threads", "4", "check", "--config", cfg, "--mode", "sample:20000:9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timestamp(report(&a)), without_timestamp(report(&b)));
    let a = run(&["--threads", "1", "invariants", "--config", cfg, "--no-thompson"]);
    let b = run(&["--threads", "3", "invariants", "--config", cfg, "--no-thompson"]);
    assert_eq!(without_timestamp(report(&a)), without_timestamp(report(&b)));
}

#[test]
fn invariants_written_to_file() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "c1.json", r#"{"variant": "C1", "field": "5^1", "S1": "X"}"#);
    let out_path = dir.path().join("report.json");
    let out = run(&["invariants", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(r["command"], "invariants");
    assert_eq!(r["result"]["exponent"]["exponent"], 5);
    assert_eq!(r["result"]["nilpotency_class"], 2);
    assert_eq!(r["result"]["center"]["order"], 5);
    assert_eq!(r["config"]["config"]["variant"], "C1");
}

#[test]
fn regular_series_and_conjugate_at_27() {
    let dir = TempDir::new().unwrap();
    let s2 = config(dir.path(), "s2.json", r#"{"variant": "S2", "field": "3^3", "S1": "0", "muC": 1}"#);
    let s2 = s2.to_str().unwrap();
    let r = report(&run(&["regular", "--config", s2, "--lines", "50"]));
    assert_eq!(r["result"]["orbit_size"], 19683);
    let out = run(&["series", "--config", s2, "--upper", "--claim", "zero", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["lower"]["class"], 6);
    assert_eq!(r["result"]["lengths_agree"], true);
    assert_eq!(r["result"]["claim"]["negative_control"]["passed"], false);
    let bad_claim = run(&["series", "--config", s2, "--claim", "monomial:1"]);
    assert_eq!(bad_claim.status.code(), Some(2));

    let pre = config(dir.path(), "pre.json", r#"{"variant": "PreS3", "field": "3^3", "S1": "X", "alpha": 2}"#);
    let out = run(&["conjugate", "--config", pre.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["points_compared"], 19683);
    assert_eq!(r["result"]["normal_form"]["config"]["variant"], "S3");
}

#[test]
fn search_params_completes_an_s4_config() {
    let out = run(&["search-params", "--field", "3^9", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["config"]["variant"], "S4");
    assert_eq!(r["seed"], 5);
    assert!(r["config"]["config"]["alpha"].is_array());
}
