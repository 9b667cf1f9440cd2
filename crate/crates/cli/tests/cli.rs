use std::process::{Command, Output};

use ebs_core::{ClassificationReport, ElementSet, Family};

fn ebs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn product_and_triple() {
    let o = ebs(&["product", "(3,5)", "(5,7)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(3,7)\n");

    let o = ebs(&["triple", "(0,0)", "(0,1)", "(0,0)"]);
    assert_eq!(stdout(&o), "(1,0) [case III]\n");

    let o = ebs(&["triple", "(0,3)", "(2,1)", "(0,0)"]);
    assert_eq!(stdout(&o), "(0,4) [case I]\n");
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(ebs(&["product", "(x,y)", "(0,0)"]).status.code(), Some(2));
    assert_eq!(ebs(&["closure", "(0,0)", "--inner", "8by8"]).status.code(), Some(2));
    assert_eq!(ebs(&["frobnicate"]).status.code(), Some(2));
    let o = ebs(&["diagram", "--family", "{\"tag\":\"Lattice\"}", "--window", "3x3@(0,0)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn closure_lattice() {
    let o = ebs(&["closure", "(0,0);(0,3)", "--inner", "8x8@(0,0)"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("● ○ ○ ● ○ ○ ● ○\n○ ○ ○ ○ ○ ○ ○ ○\n"));
    assert!(out.ends_with("case 3.3.3-(13), Lattice at (0,0) p=3\n"), "{out}");
}

#[test]
fn closure_singleton_ascii() {
    let o = ebs(&["closure", "(4,4)", "--inner", "6x6@(0,0)", "--charset", "ascii"]);
    let out = stdout(&o);
    assert_eq!(out.matches('#').count(), 1);
    assert!(out.contains("case 1.1.1"));
}

#[test]
fn closure_saturates() {
    let o = ebs(&["closure", "(0,0);(0,1)", "--inner", "5x5@(0,0)"]);
    let out = stdout(&o);
    assert_eq!(out.matches('●').count(), 25);
    assert!(out.contains("Lattice at (0,0) p=1"));
}

#[test]
fn closure_json_round_trips() {
    let o = ebs(&["closure", "(0,0);(1,1);(0,3)", "--inner", "9x9@(0,0)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let set: ElementSet = serde_json::from_value(v["set"].clone()).unwrap();
    let report: ClassificationReport = serde_json::from_value(v["report"].clone()).unwrap();
    let family = report.family.clone().unwrap();
    assert_eq!(family.materialize(set.window()), set);
    assert_eq!(report.case.to_string(), "3.3.3-(12)");
    let again = serde_json::to_value(&report).unwrap();
    assert_eq!(again, v["report"]);
}

#[test]
fn unmatched_closure_exits_3_with_witness() {
    let o = ebs(&["closure", "(0,2);(1,0)", "--inner", "5x5@(0,0)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("witness: (0,0)"));
}

#[test]
fn classify_rejects_unclosed_sets() {
    let o = ebs(&["classify", "(0,0);(0,1)", "--window", "3x3@(0,0)"]);
    assert_eq!(o.status.code(), Some(3));
    let o = ebs(&["classify", "(0,0);(1,1);(3,3)", "--window", "5x5@(0,0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("case 1.1.2, DiagonalChain at (0,0) offsets=[1,3]"));
}

#[test]
fn enumerate_counts() {
    let o = ebs(&["enumerate", "--window", "1x1@(0,0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("count: 2\ngolden: 2 (match)\n"));

    let o = ebs(&["enumerate", "--window", "3x2@(5,-1)", "--jobs", "2"]);
    assert!(stdout(&o).starts_with("count: 21\n"));

    assert_eq!(ebs(&["enumerate", "--window", "6x6@(0,0)"]).status.code(), Some(2));
}

#[test]
fn cross_validation_reports_failures() {
    let o = ebs(&["enumerate", "--window", "4x4@(0,0)", "--cross-validate"]);
    let out = stdout(&o);
    assert!(out.contains("count: 172\n"));
    assert!(out.contains("failures: 59\n"));
    assert_eq!(o.status.code(), Some(3));

    let o = ebs(&["enumerate", "--window", "2x1@(0,0)", "--cross-validate", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 4);
    assert_eq!(v["cross_validation"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn golden_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("window_counts.txt"), "version 1\n2x2 11\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ebs"))
        .args(["enumerate", "--window", "2x2@(0,0)"])
        .env("EBS_GOLDEN_DIR", dir.path())
        .output()
        .unwrap();
    assert!(stdout(&o).contains("golden: 11 (MISMATCH)"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tro_verify() {
    let o = ebs(&["tro", "verify", "--corner", "0,0", "--n", "40", "--trials", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("passes: 100/100\n"));

    let o = ebs(&[
        "tro", "verify", "--family", r#"{"tag":"Singleton","p":[5,5]}"#,
        "--n", "20", "--trials", "10", "--seed", "1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passes"], 10);
    assert_eq!(v["trials"], 10);

    assert_eq!(ebs(&["tro", "verify", "--corner", "zero", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn tro_verify_is_deterministic() {
    let args = ["tro", "verify", "--corner", "1,-2", "--n", "12", "--trials", "20", "--seed", "7"];
    assert_eq!(stdout(&ebs(&args)), stdout(&ebs(&args)));
}

#[test]
fn tro_isometry() {
    let o = ebs(&["tro", "isometry", "--element", "(2,5)", "--n", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "safe columns: 396, exact: true\n");

    let o = ebs(&["tro", "isometry", "--element", "(9,0)", "--n", "4"]);
    assert_eq!(stdout(&o), "safe columns: 0, exact: true\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 safe columns"));
}

#[test]
fn diagrams() {
    let f = r#"{"tag":"LatticeUnion","anchor":[0,0],"period":3,"offsets":[0,1]}"#;
    let o = ebs(&["diagram", "--family", f, "--window", "10x10@(0,0)", "--charset", "ascii"]);
    let rows: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0], "# . . # . . # . . #");
    assert_eq!(rows[1], ". # . . # . . # . .");
    assert_eq!(rows[2], ". . . . . . . . . .");
    assert_eq!(rows[3], rows[0]);

    let f = r#"{"tag":"DiagonalChain","anchor":[0,0],"offsets":[1,3]}"#;
    let o = ebs(&["diagram", "--family", f, "--window", "6x6@(0,0)"]);
    assert_eq!(stdout(&o).matches('●').count(), 3);

    let f = r#"{"tag":"Singleton","p":[1,1]}"#;
    let o = ebs(&["diagram", "--family", f, "--window", "3x3@(0,0)"]);
    assert_eq!(stdout(&o), "○ ○ ○\n○ ● ○\n○ ○ ○\n");
    let family: Family = serde_json::from_str(f).unwrap();
    assert_eq!(serde_json::from_str::<Family>(&serde_json::to_string(&family).unwrap()).unwrap(), family);
}
