//! End-to-end runs of the `nilradon` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilradon")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data lines of a CSV artifact, without the `#` header lines.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn group_check_reports_zero_counterexamples() {
    let o = run(&["group-check", "--d", "3", "--samples", "10000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(data_lines(&text)[1], "3,10000,0,0,0,0,0");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("PASS group-check"));
}

#[test]
fn expsum_table_anchor_row_is_one() {
    let o = run(&["expsum-table", "--d", "2", "--r", "1", "--qmax", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = data_lines(&text);
    assert_eq!(rows[0], "q,max_abs_S,max_abs_Stilde,argmax_a");
    assert!(rows[1].starts_with("1,1.0000000000000000e0,1.0000000000000000e0,"));
    assert_eq!(rows.len(), 31);
    assert!(text.contains("# parameters epsilon=-,r=1,kappa=- asymptotic_regime=outside"));
}

#[test]
fn norm_sweep_has_a_ratio_column() {
    let o = run(&["norm-sweep", "--d", "1", "--kernel", "hilbert", "--R", "16,64,256,1024"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = data_lines(&text);
    assert!(rows[0].ends_with(",ratio"));
    assert_eq!(rows.len(), 5);
    assert!(rows[1].ends_with(','), "first row has no ratio");
    for row in &rows[2..] {
        let ratio: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ratio > 0.0);
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["osc-scan", "--d", "1", "--beta", "0,3", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(read(&a, "osc.csv"), read(&b, "osc.csv"));
}

#[test]
fn config_file_with_flag_override_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "group-check", "d": [1, 2], "samples": 50, "seed": 3}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&["--config", cfg.to_str().unwrap(), "group-check", "--seed", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m: Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(m["config"]["seed"], 11);
    assert_eq!(m["config"]["samples"], 50);
    assert_eq!(m["config"]["d"], serde_json::json!([1, 2]));
    assert_eq!(m["pass"], true);
    assert!(m["versions"]["nilradon"].is_string());
    assert!(m["wall_times"]["compute_seconds"].is_number());
    let hash = m["config_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(read(&out, "group_check.csv").starts_with(&format!("# nilradon group-check config_sha256={hash}\n")));
}

#[test]
fn json_artifacts_embed_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["kernel-check", "--jmax", "6", "--samples", "100", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m: Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    let r: Value = serde_json::from_str(&read(dir.path(), "cz_report.json")).unwrap();
    assert_eq!(r["config_sha256"], m["config_sha256"]);
    assert_eq!(r["result"]["cz"]["passed"], true);
    // c_1 ..= c_{jmax+1}
    assert_eq!(data_lines(&read(dir.path(), "cj.csv")).len(), 8);
}

#[test]
fn compose_kernel_matches_the_chain() {
    let o = run(&["compose-kernel", "--d", "1", "--pairs", "2:3", "--variant", "Dtilde"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let head: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(head["command"], "compose-kernel");
    assert!(text.lines().count() > 1);
}

#[test]
fn property_failure_exits_one() {
    let o = run(&["ortho-demo", "--generator", "radon", "--k", "2", "--a", "0.001"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("FAIL ortho-demo"));
}

#[test]
fn usage_and_budget_errors_exit_two() {
    assert_eq!(run(&["group-check", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["group-check", "--d", "0"]).status.code(), Some(2));
    assert_eq!(run(&["compose-kernel", "--pairs", "1-2"]).status.code(), Some(2));
    assert_eq!(run(&["expsum-table", "--d", "3", "--r", "3", "--qmax", "30", "--budget", "1000"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"samples": -1}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "group-check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config field 'samples'"));
    std::fs::write(&cfg, r#"{"command": "seq-check"}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "group-check"]).status.code(), Some(2));
}

#[test]
fn help_documents_csv_schemas() {
    let o = run(&["weyl-scan", "--help"]);
    assert!(stdout(&o).contains("weyl.csv: theta_desc,P,r,ratio"));
}
