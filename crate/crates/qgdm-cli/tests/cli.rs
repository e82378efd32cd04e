//! End-to-end checks of the `qgdm` binary: argument handling, exit codes,
//! and the files a run leaves behind.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "scenario,method,episodes,cr_pct,sr_pct,n_col,hd_m,v_mean,a_mean,t_mean,\
                      rho_cll,rho_clr,rho_kl,lat_mean_ms,lat_max_ms";

fn qgdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgdm"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_a_csv_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
            "scenarios": ["merging-2p"],
            "policies": ["rule", "cg-epd"],
            "episodes": 2,
            "seed": 11,
            "record_latency": false
        }"#,
    );
    let out = dir.path().join("results");
    let output = qgdm(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 3, "two policy rows expected:\n{report}");
    assert!(lines[1].starts_with("merging-2p,cg-epd,2,"));
    assert!(lines[2].starts_with("merging-2p,rule,2,"));

    // The same table is echoed to stdout for interactive runs.
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout, report);
}

#[test]
fn cli_filters_narrow_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
            "scenarios": ["merging-2p", "roundabout-2p"],
            "policies": ["rule", "utility", "cg-epd"],
            "episodes": 5,
            "record_latency": false
        }"#,
    );
    let out = dir.path().join("results");
    let output = qgdm(&[
        "run",
        "--config",
        &config,
        "--scenario",
        "roundabout-2p",
        "--policy",
        "rule",
        "--episodes",
        "2",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("roundabout-2p,rule,2,"));
}

#[test]
fn json_format_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": ["merging-2p"], "policies": ["rule"], "episodes": 2}"#,
    );
    let out = dir.path().join("results");
    let output = qgdm(&[
        "run",
        "--config",
        &config,
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = fs::read_to_string(out.join("report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value[0]["scenario"], "merging-2p");
    assert_eq!(value[0]["method"], "rule");
    assert_eq!(value[0]["episodes"], 2);
}

#[test]
fn trace_flag_writes_decision_traces() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"scenarios": ["merging-2p"], "policies": ["qgdm-g"], "episodes": 2}"#,
    );
    let out = dir.path().join("results");
    let output =
        qgdm(&["run", "--config", &config, "--trace", "--out", out.to_str().unwrap()]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let traces = fs::read_to_string(out.join("trace_merging-2p_qgdm-g.jsonl")).unwrap();
    assert!(!traces.is_empty());
    for line in traces.lines() {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(value["episode"].is_u64());
        assert!(value["action"].is_string());
    }
}

#[test]
fn missing_config_file_fails() {
    let output = qgdm(&["run", "--config", "/nonexistent/config.json"]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("error:"));
}

#[test]
fn invalid_config_fails_with_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"episodes": "many"}"#);
    let output = qgdm(&["run", "--config", &config]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("parse"));
}

#[test]
fn unknown_policy_name_fails_at_argument_parsing() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "{}");
    let output = qgdm(&["run", "--config", &config, "--policy", "qgdm-x"]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("qgdm-x"));
}

#[test]
fn empty_scenario_filter_cannot_be_expressed_but_empty_config_list_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"scenarios": []}"#);
    let output = qgdm(&["run", "--config", &config]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("scenario"));
}

#[test]
fn checked_in_example_configs_parse_and_validate() {
    let examples = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&examples).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = fs::read_to_string(&path).unwrap();
            qgdm_core::harness::ExperimentConfig::from_json(&text)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 2, "expected at least two example configs, found {seen}");
}
