use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn oqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oqs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn qubit_demo_vacuum_rate_table() {
    let out = oqs(&[
        "qubit-demo",
        "--format",
        "json",
        "--set",
        "qubit.g0=1",
        "--set",
        "qubit.n0=0",
    ]);
    let v = json(&out);
    assert_eq!(v["meta"]["rates"]["pp_pp"], -1.0);
    assert_eq!(v["meta"]["rates"]["pp_mm"], 0.0);
    assert!(v["meta"]["max_abs_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn zero_coupling_keeps_purity() {
    let cfg = config("qubit_markov.toml");
    let out = oqs(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--set",
        "system.coupling={re=[[0.0,0.0],[0.0,0.0]]}",
        "--set",
        "initial={matrix={re=[[0.5,0.5],[0.5,0.5]]}}",
    ]);
    let v = json(&out);
    let cols: Vec<&str> = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    let k = cols.iter().position(|c| *c == "purity").unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!((row[k].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn wick_check_single_mode() {
    let cfg = config("single_mode.toml");
    let v = json(&oqs(&[
        "wick-check",
        "--config",
        cfg.to_str().unwrap(),
        "--max-n",
        "4",
        "--format",
        "json",
    ]));
    assert!(v["meta"]["max_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn outputs_are_deterministic_and_stamped() {
    let cfg = config("three_level.toml");
    let a = oqs(&["kernel-scan", "--config", cfg.to_str().unwrap()]);
    let b = oqs(&["kernel-scan", "--config", cfg.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains(&format!("oqs {}", env!("CARGO_PKG_VERSION"))));
    let hash_line = text
        .lines()
        .find(|l| l.starts_with("# config_sha256 = "))
        .unwrap();
    assert_eq!(hash_line.len(), "# config_sha256 = ".len() + 64);
    // header + 11 scan points
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 12);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let cfg = config("qubit_markov.toml");
    let out = oqs(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("time,rho_0_0_re,rho_0_0_im"));
    assert!(text.contains("min_eigenvalue,purity"));
}

#[test]
fn memory_mode_and_rwa_flags() {
    let cfg = config("qubit_memory.toml");
    let v = json(&oqs(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--set",
        "simulation.stop=5.0",
    ]));
    assert_eq!(v["meta"]["mode"], "memory");
    let v = json(&oqs(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--mode",
        "markov",
        "--rwa",
        "off",
    ]));
    assert_eq!(v["meta"]["mode"], "markov");
    assert_eq!(v["meta"]["rwa"], false);
}

#[test]
fn resonances_report_roots() {
    let cfg = config("qubit_markov.toml");
    let v = json(&oqs(&[
        "resonances",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let coherence = rows.iter().find(|r| r[1] == 1.0).unwrap();
    assert!(coherence[3].as_f64().unwrap() < 0.0);
}

fn error_record(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.lines().last().unwrap()).expect("json error record")
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "schema_version = 1\n[bath]\nmodel = \"ohmic\"\nbeta = [1]\n",
    )
    .unwrap();
    let out = oqs(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let rec = error_record(&out);
    assert_eq!(rec["error"], "config");
    assert!(rec["message"].as_str().unwrap().contains("line"));
    assert_eq!(
        oqs(&["simulate", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(oqs(&["simulate", "--format", "xml"]).status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    // A lossless mode in exact resonance puts a pole of the kernel on the
    // unperturbed frequency.
    let cfg = config("single_mode.toml");
    let out = oqs(&["resonances", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["exit_code"], 2);
}
