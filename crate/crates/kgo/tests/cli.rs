//! CLI contract tests: exit codes, output determinism, JSON round-trip,
//! CSV schema.

use kgo::measures::MeasureReport;
use std::process::{Command, Output};

fn kgo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgo"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn table_csv_column_order() {
    let out = kgo(&["table", "--gamma-list", "0", "--n", "0", "--mode", "direct"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("header line");
    assert!(header.starts_with("n,gamma,x2,dx,p2,dp,dxdp,fx,fp,fxfp,sx,sp,s_sum"));
}

#[test]
fn repeated_runs_byte_identical() {
    let args = ["table", "--gamma-list", "0,-0.16,-0.32", "--n", "0,1", "--format", "json"];
    let a = kgo(&args);
    let b = kgo(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_rows_round_trip() {
    let out = kgo(&["table", "--gamma-list", "0,-0.16", "--n", "0,1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in doc["rows"].as_array().unwrap() {
        let parsed: MeasureReport = serde_json::from_value(row.clone()).unwrap();
        let back = serde_json::to_value(&parsed).unwrap();
        assert_eq!(row, &back, "round trip changed the row");
    }
}

#[test]
fn no_physical_root_exits_2() {
    // gamma=-1.2, n=1: the only positive quartic root is spurious.
    let out = kgo(&["spectrum", "--gamma", "-1.2", "--n-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no physical root"), "stderr: {err}");
}

#[test]
fn forensic_rows_exit_3() {
    // gamma=-0.8 momentum rows are non-normalizable; forensic mode evaluates
    // their closed forms anyway and signals that via the exit code.
    let out = kgo(&["table", "--gamma-list", "-0.8", "--n", "0", "--forensic"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("p_forensic"), "output: {text}");
}

#[test]
fn non_normalizable_density_exits_4() {
    let out = kgo(&[
        "density", "--gamma", "-0.8", "--n", "0", "--space", "momentum",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn invalid_density_curve_exits_4() {
    // gamma=-0.32 momentum: normalizable, but the weight changes sign inside
    // the domain, so the Fisher density is undefined.
    let out = kgo(&[
        "density", "--gamma", "-0.32", "--n", "0", "--space", "momentum", "--kind", "fisher",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn density_csv_shape() {
    let out = kgo(&[
        "density", "--gamma", "-0.16", "--n", "1", "--grid", "-3:3:7",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "a,value");
    assert_eq!(data.len(), 8);
    let first: Vec<f64> = data[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], -3.0);
}

#[test]
fn selftest_passes() {
    let out = kgo(&["selftest"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn output_file_flag() {
    let dir = std::env::temp_dir().join("kgo-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spectrum.csv");
    let out = kgo(&[
        "spectrum", "--gamma", "-0.5", "--n-max", "3", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("gamma,n,energy"));
    assert!(text.contains("asymptote=2"));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn bad_usage_exits_1() {
    let out = kgo(&["spectrum", "--gamma", "0.1", "--gamma-list", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
}
