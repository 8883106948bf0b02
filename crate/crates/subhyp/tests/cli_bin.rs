//! Exercises the installed binary: exit-code conventions, report routing,
//! and artifact emission.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subhyp"))
}

#[test]
fn usage_errors_exit_64() {
    let out = bin().args(["geodesic", "--domain", "catalog:square"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64), "missing required flags");
    let out = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn domain_file_errors_exit_65() {
    let out = bin()
        .args(["geodesic", "--domain", "/no/such/file.json", "--alpha", "1", "--from", "0.2,0.2", "--to", "0.4,0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(65));
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("InvalidDomain"), "{json}");
}

#[test]
fn numeric_errors_exit_70_with_error_name() {
    let out = bin()
        .args(["geodesic", "--domain", "catalog:square", "--alpha", "1", "--from", "2.0,2.0", "--to", "0.4,0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(70));
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("PointOutsideDomain"), "{json}");
}

#[test]
fn geodesic_report_and_artifacts() {
    let dir = std::env::temp_dir().join("subhyp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let svg = dir.join("curve.svg");
    let out_path = dir.join("report.json");
    let out = bin()
        .args([
            "geodesic",
            "--domain",
            "catalog:square",
            "--alpha",
            "1",
            "--from",
            "0.2,0.2",
            "--to",
            "0.7,0.2",
            "--svg",
            svg.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(&out_path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 0.5).abs() < 0.005);
    assert!(v["result"]["curve"].as_array().unwrap().len() >= 2);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
}

#[test]
fn catalog_emit_roundtrips_through_file() {
    let dir = std::env::temp_dir().join("subhyp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("square.json");
    let out = bin()
        .args(["catalog", "emit", "square", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // the emitted file loads back as a domain
    let out = bin()
        .args([
            "geodesic",
            "--domain",
            path.to_str().unwrap(),
            "--alpha",
            "1",
            "--from",
            "0.2,0.2",
            "--to",
            "0.7,0.2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn certify_csv_table() {
    let dir = std::env::temp_dir().join("subhyp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("scales.csv");
    let out = bin()
        .args([
            "certify",
            "--domain",
            "catalog:square",
            "--alpha",
            "0.5",
            "--theta",
            "0.5",
            "--budget",
            "15",
            "--csv",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "square certifies subhyperbolic");
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("scale,pairs,max_ratio,mean_ratio"));
    assert!(table.lines().count() >= 4);
}

#[test]
fn help_exits_zero() {
    let out = bin().args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("geodesic"));
    assert!(text.contains("scan-alpha"));
}
