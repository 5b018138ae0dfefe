use std::process::{Command, Output};

use hcm_cli::Report;

fn hcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcm")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn unknown_table_is_a_usage_error() {
    let out = hcm(&["table", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn even_repeats_are_a_usage_error() {
    let out = hcm(&["bench", "--case", "forward-1", "--repeats", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn unknown_case_is_a_usage_error() {
    assert_eq!(hcm(&["bench", "--case", "forward-9", "--repeats", "1"]).status.code(), Some(2));
}

#[test]
fn table3_markdown_layout() {
    let out = hcm(&["table", "3", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with('|')).collect();
    // Header, separator, 16 solutions.
    assert_eq!(lines.len(), 18);
    for line in &lines {
        assert_eq!(line.matches('|').count(), 6, "{line}");
    }
}

#[test]
fn table2_json_has_both_methods_per_row() {
    let out = hcm(&["table", "2", "--format", "json", "--repeats", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.rows.len(), 16);
    assert_eq!(report.records.len(), 16);
    let first = &report.records[0];
    assert_eq!(first.method, hcm_core::Corrector::Ostrowski);
    for (a, b) in first.solution.iter().zip([1.57197, 0.71419, 0.58723]) {
        assert!((a - b).abs() < 1e-3);
    }
}

#[test]
fn table1_and_table4_succeed() {
    for id in ["1", "4"] {
        let out = hcm(&["table", id, "--format", "csv", "--repeats", "1"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let rows = stdout(&out).lines().count();
        assert_eq!(rows, 5);
    }
}

#[test]
fn forward_csv_has_one_row_per_preset() {
    let out = hcm(&["forward", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 9);
}

#[test]
fn params_file_drives_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("params.json");
    std::fs::write(
        &path,
        r#"{"e": 0.182, "dr": 0.382, "betas": [0.0, 2.0943951023931953, 4.1887902047863905],
            "lengths": [1.486, 1.386, 1.576], "pose": [0.5, -1.5, 1.0]}"#,
    )
    .unwrap();
    let out = hcm(&["inverse", "--params", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.rows.len(), 6);
}

#[test]
fn malformed_params_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"e\": 0.1}").unwrap();
    assert_eq!(hcm(&["forward", "--params", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn divergence_exits_with_one() {
    // A single increment cannot reach the forward roots to this tolerance.
    let out = hcm(&["forward", "--t-steps", "1", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trace_is_recorded_in_json() {
    let out = hcm(&["forward", "--format", "json", "--trace", "--t-steps", "30"]);
    let report: Report = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.traces.len(), 8);
    assert_eq!(report.traces[0].points.len(), 30);
}

#[test]
fn verify_passes_on_reference_geometry() {
    let out = hcm(&["verify", "--repeats", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
