use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

const Z2: &str = r#"{"constant": [1, 0], "zeros": [{"z": [0, 0], "m": 2}]}"#;
const Z2_PHI: &str =
    r#"{"constant": [1, 0], "zeros": [{"z": [0, 0], "m": 2}, {"z": [0.4, 0], "m": 1}]}"#;

fn blaschke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blaschke"))
        .args(args)
        .output()
        .expect("spawn")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn analyze_square() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "z2.json", Z2);
    let out = blaschke(&["analyze", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["q"], 2);
    assert_eq!(v["orbits"], serde_json::json!([[0], [1]]));
    assert_eq!(v["glue_connected"], true);
}

#[test]
fn levelset_of_the_square_is_a_circle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "z2.json", Z2);
    let out = blaschke(&[
        "levelset",
        "--input",
        input.to_str().unwrap(),
        "--t",
        "0.5",
        "--samples",
        "256",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["branch_id", "t_param", "re", "im"]
    );
    let mut branches = std::collections::BTreeSet::new();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        branches.insert(rec[0].to_string());
        let (x, y): (f64, f64) = (rec[2].parse().unwrap(), rec[3].parse().unwrap());
        assert!((x.hypot(y) - 0.5f64.sqrt()).abs() < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 512);
    assert_eq!(branches.len(), 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write(dir.path(), "z2.json", Z2);
    let zp = write(dir.path(), "zp.json", Z2_PHI);
    let (z2, zp) = (z2.to_str().unwrap(), zp.to_str().unwrap());
    let commands: Vec<Vec<&str>> = vec![
        vec!["analyze", "--input", z2],
        vec!["analyze", "--input", zp],
        vec!["glue", "--input", zp],
        vec!["thin-gen", "--truncation", "12", "--seed", "3"],
        vec![
            "thin-construct",
            "--pool",
            "factorial",
            "--stages",
            "3",
            "--seed",
            "0",
        ],
        vec!["bergman-check", "--input", zp],
        vec!["levelset", "--input", zp, "--t", "0.3", "--samples", "32"],
    ];
    for args in commands {
        let a = blaschke(&args);
        let b = blaschke(&args);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn output_flag_and_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.json");
    let out = blaschke(&[
        "thin-gen",
        "--truncation",
        "10",
        "--output",
        seq.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let ext = blaschke(&["thin-extract", "--input", seq.to_str().unwrap(), "--k", "5"]);
    assert_eq!(ext.status.code(), Some(0));
    assert_eq!(json(&ext)["certificate"].as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "z2.json", Z2);
    let outside = write(
        dir.path(),
        "bad.json",
        r#"{"constant": [1, 0], "zeros": [{"z": [1.5, 0], "m": 1}]}"#,
    );
    let garbage = write(dir.path(), "junk.json", "{not json");
    assert_eq!(blaschke(&["--help"]).status.code(), Some(0));
    assert_eq!(blaschke(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(blaschke(&["analyze"]).status.code(), Some(1));
    assert_eq!(
        blaschke(&["analyze", "--input", "/nonexistent/z.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        blaschke(&["analyze", "--input", outside.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        blaschke(&["analyze", "--input", garbage.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        blaschke(&["levelset", "--input", good.to_str().unwrap(), "--t", "1.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        blaschke(&["thin-gen", "--tol.no_such_knob=1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        blaschke(&["thin-gen", "--truncation", "30"]).status.code(),
        Some(1)
    );
    assert_eq!(
        blaschke(&["thin-gen", "--truncation", "30", "--tol.max_truncation=30"])
            .status
            .code(),
        Some(0)
    );

    // Numerical failures carry their own document shape.
    let seq = dir.path().join("seq.json");
    blaschke(&[
        "thin-gen",
        "--truncation",
        "6",
        "--output",
        seq.to_str().unwrap(),
    ]);
    let out = blaschke(&[
        "thin-extract",
        "--input",
        seq.to_str().unwrap(),
        "--k",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["failure"]["gate"], "pool_exhausted");
    assert!(v.get("certificate").is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn corrupted_inputs_never_crash(pos in 0usize..Z2_PHI.len(), byte in any::<u8>()) {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = Z2_PHI.as_bytes().to_vec();
        bytes[pos] = byte;
        let p = dir.path().join("x.json");
        std::fs::write(&p, &bytes).unwrap();
        let out = blaschke(&["analyze", "--input", p.to_str().unwrap()]);
        let code = out.status.code();
        prop_assert!(matches!(code, Some(0..=2)), "exit {code:?}: {}", String::from_utf8_lossy(&out.stderr));
        if code == Some(2) {
            prop_assert!(json(&out).get("failure").is_some());
        }
    }
}
