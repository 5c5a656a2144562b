use std::process::{Command, Output};

use serde_json::Value;

fn cfslice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfslice"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn json_without_timing(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn run_is_reproducible() {
    let args = ["run", "--scheme", "proposed", "--seed", "7", "--set", "config.K=25"];
    let a = cfslice(&args);
    let b = cfslice(&args);
    assert!(a.status.success());
    assert_eq!(json_without_timing(&a), json_without_timing(&b));
    let v = json_without_timing(&a);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["K"], 25);
}

#[test]
fn overloaded_hybrid_uses_fallback() {
    let out = cfslice(&["run", "--preset", "overloaded", "--scheme", "hybrid"]);
    assert!(out.status.success());
    let v = json_without_timing(&out);
    assert_eq!(v["report"]["fallback_used"], true);
}

#[test]
fn trace_flag_adds_trace() {
    let plain = json_without_timing(&cfslice(&["run", "--set", "config.K=10"]));
    let traced = json_without_timing(&cfslice(&["run", "--set", "config.K=10", "--trace"]));
    assert!(plain.get("trace").is_none());
    assert!(traced["trace"]["iterations_used"].as_u64().unwrap() >= 1);
}

#[test]
fn config_errors_exit_two() {
    let out = cfslice(&["run", "--config", "/definitely/missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(cfslice(&["run", "--set", "config.nope=1"]).status.code(), Some(2));
    assert_eq!(cfslice(&["run", "--set", "config.theta=3"]).status.code(), Some(2));
    assert_eq!(cfslice(&["run", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(cfslice(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let setup = cfslice_sim::presets::preset("desk").unwrap();
    std::fs::write(&path, serde_json::to_string_pretty(&setup).unwrap()).unwrap();
    let from_file = cfslice(&["run", "--config", path.to_str().unwrap(), "--set", "config.K=12"]);
    let from_preset = cfslice(&["run", "--preset", "desk", "--set", "config.K=12"]);
    assert!(from_file.status.success());
    assert_eq!(json_without_timing(&from_file), json_without_timing(&from_preset));

    std::fs::write(&path, r#"{"config": {"M": 3}, "extra": 1}"#).unwrap();
    assert_eq!(cfslice(&["run", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn validate_passes_and_filters() {
    let all = cfslice(&["validate"]);
    assert!(all.status.success());
    let v: Value = serde_json::from_slice(&all.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);

    let one = cfslice(&["validate", "--suite", "lp_oracle"]);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["suite"], "lp_oracle");

    assert_eq!(cfslice(&["validate", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn perturbed_sinr_fails_equivalence() {
    let out = cfslice(&["validate", "--suite", "sinr_equivalence", "--perturb-sinr-numerator", "1.0001"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["passed"], false);
}

#[test]
fn sweep_writes_csv_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("trials.jsonl");
    let gains = dir.path().join("gains.json");
    let out = cfslice(&[
        "sweep", "--k", "10,20", "--trials", "2", "--dump-trials", dump.to_str().unwrap(),
        "--gains", gains.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("K,scheme,metric,mean,stderr,n_trials,seed\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 6);
    assert_eq!(std::fs::read_to_string(&dump).unwrap().lines().count(), 2 * 2 * 3);
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&gains).unwrap()).unwrap();
    assert_eq!(g["rows"].as_array().unwrap().len(), 2);

    let json = cfslice(&["sweep", "--k", "10", "--trials", "1", "--format", "json"]);
    let v: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn bench_single_k_gives_one_row_per_scheme() {
    let out = cfslice(&["bench", "--k", "15", "--trials", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("15,")));
}
