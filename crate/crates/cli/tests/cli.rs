use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propsign"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exited normally")
}

fn envelope(args: &[&str]) -> Value {
    let out = run(args);
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn envelope_has_the_fixed_keys() {
    let v = envelope(&["covmap"]);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["schema", "command", "config_echo", "results", "verdict", "notes"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "covmap");
    assert_eq!(v["verdict"], "verified");
    assert_eq!(v["config_echo"]["seed"], 1);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&["no-such-command"]), 64);
    assert_eq!(code(&["im-indeterminate", "--param", "beta=1.5"]), 64);
    assert_eq!(code(&["covmap", "--tol", "bogus=1"]), 64);
    assert_eq!(code(&["covmap", "--param", "tau"]), 64);
    assert_eq!(code(&["covmap", "--param", "tau=-1"]), 64);
    assert_eq!(code(&["free-sign", "--fixture", "nope"]), 64);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn malformed_input_exits_65() {
    assert_eq!(code(&["kraus", data("kraus_incomplete.json").to_str().unwrap()]), 65);
    assert_eq!(code(&["kraus", "/nonexistent/channel.json"]), 65);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"ops\": 3}").unwrap();
    assert_eq!(code(&["kraus", bad.to_str().unwrap()]), 65);
    std::fs::write(&bad, "{\"mass\": -1}").unwrap();
    assert_eq!(code(&["rwa", bad.to_str().unwrap()]), 65);
}

#[test]
fn accuracy_failures_exit_2() {
    assert_eq!(code(&["free-sign", "--param", "n_k=4"]), 2);
    assert_eq!(code(&["covmap", "--param", "tau=200"]), 2);
    assert_eq!(code(&["rwa", "--fixture", "pumped", "--param", "sweep_n=0"]), 2);
}

#[test]
fn claim_failure_exits_1() {
    // an impossible tolerance turns a passing check into a failed claim
    assert_eq!(code(&["covmap", "--tol", "roundtrip=0"]), 1);
}

#[test]
fn inconclusive_witness_warns_but_succeeds() {
    let out = run(&["covmap", "--param", "lambda=0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "inconclusive");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn kraus_verdicts_from_files() {
    let v = envelope(&["kraus", data("kraus_unitary.json").to_str().unwrap()]);
    assert_eq!(v["verdict"], "invertible_unitary");
    assert!(v["results"][0]["round_trip_error"].as_f64().unwrap() <= 1e-9);
    let v = envelope(&["kraus", data("kraus_depolarizing.json").to_str().unwrap()]);
    assert_eq!(v["verdict"], "not_invertible");
}

#[test]
fn same_seed_same_bytes() {
    for args in [
        &["free-sign", "--param", "n=20"][..],
        &["covmap", "--seed", "9"][..],
        &["kraus", data("kraus_unitary.json").to_str().unwrap()][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn seed_changes_random_rows() {
    let a = run(&["free-sign", "--param", "n=5", "--seed", "1"]).stdout;
    let b = run(&["free-sign", "--param", "n=5", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["bessel-identities"];
    let one = Command::new(env!("CARGO_BIN_EXE_propsign"))
        .args(args)
        .env("PROPSIGN_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_propsign"))
        .args(args)
        .env("PROPSIGN_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.stdout, four.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_propsign"))
        .args(args)
        .env("PROPSIGN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn csv_output_has_one_line_per_row() {
    let out = run(&["bessel-identities", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "identity,m,dt,x,lhs,rhs,error,tolerance,pass");
    assert_eq!(lines.count(), 250);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("covmap.json");
    let out = run(&["covmap", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "covmap");
}

#[test]
fn free_model_reproduces_free_golden_values() {
    let v = envelope(&["rwa", "--fixture", "free", "--param", "sweep_n=10"]);
    assert_eq!(v["verdict"], "verified");
    let golden: Vec<&Value> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["part"] == "free_golden")
        .collect();
    assert_eq!(golden.len(), 18);
    assert!(golden.iter().all(|r| r["pass"] == true));
}
