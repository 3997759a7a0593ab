//! End-to-end runs of the `isoread` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn isoread(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoread"))
        .args(args)
        .env_remove("ISOREAD_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = isoread(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    serde_json::from_str(&stdout_ok(args)).unwrap()
}

#[test]
fn gen_prints_graph6_lines() {
    let out = stdout_ok(&["gen", "cycles", "--k", "3,4"]);
    assert_eq!(out.lines().count(), 4);
    assert_eq!(stdout_ok(&["gen", "complete", "--n", "3"]).trim(), "Bw");
    assert_eq!(stdout_ok(&["gen", "petersen"]).lines().count(), 1);
}

#[test]
fn wl_check_reports_hard_pair() {
    let lines = stdout_ok(&["gen", "cycles", "--k", "3"]);
    let g: Vec<&str> = lines.lines().collect();
    let v = json_ok(&["wl-check", g[0], g[1]]);
    assert_eq!(v["wl_equivalent"], true);
    assert_eq!(v["isomorphic"], false);
}

#[test]
fn decompose_reproduces_small_cycle() {
    let c6 = stdout_ok(&["gen", "cycle", "--k", "6"]);
    let v = json_ok(&["decompose", "--graph", c6.trim(), "--coeffs", "1,5,3,2"]);
    assert_eq!(v["n"], 6);
    assert_eq!(v["automorphisms"], 12);
    let ev: Vec<f64> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (a, b) in ev.iter().zip([16.0, 1.0, 1.0, -2.0, -5.0, -5.0]) {
        assert!((a - b).abs() < 1e-9);
    }
    let mut sizes: Vec<u64> = v["block_sizes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 1, 2, 2]);
}

#[test]
fn readout_from_csv_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let json = dir.path().join("m.json");
    let rows: Vec<String> = (0..10)
        .map(|i| format!("{},{}", i as f64 * 0.5, (i % 3) as f64))
        .collect();
    std::fs::write(&csv, rows.join("\n") + "\n").unwrap();
    let data: Vec<[f64; 2]> = (0..10).map(|i| [i as f64 * 0.5, (i % 3) as f64]).collect();
    std::fs::write(
        &json,
        serde_json::json!({"n": 10, "d": 2, "data": data}).to_string(),
    )
    .unwrap();
    let g = stdout_ok(&["gen", "petersen"]);
    let a = json_ok(&[
        "readout",
        "--graph",
        g.trim(),
        "--features",
        csv.to_str().unwrap(),
    ]);
    let b = json_ok(&[
        "readout",
        "--graph",
        g.trim(),
        "--features",
        json.to_str().unwrap(),
    ]);
    assert_eq!(a, b);
    // 16 blocks, each with 3 scalar statistics and an 8-dim projected mean
    assert_eq!(a.as_array().unwrap().len(), 16 * (3 + 8));
    let s = json_ok(&[
        "readout",
        "--graph",
        g.trim(),
        "--features",
        csv.to_str().unwrap(),
        "--kind",
        "sum",
    ]);
    assert_eq!(s.as_array().unwrap().len(), 2);
}

#[test]
fn separate_is_reproducible() {
    let args = ["separate", "--family", "srg16", "--seeds", "2"];
    let a = json_ok(&args);
    assert_eq!(a["separated"], true);
    assert_eq!(a, json_ok(&args));
    let b = json_ok(&[
        "separate",
        "--family",
        "srg16",
        "--seeds",
        "2",
        "--readout",
        "sum",
    ]);
    assert_eq!(b["separated"], false);
}

#[test]
fn suite_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suite.csv");
    stdout_ok(&[
        "suite",
        "--cycle-ks",
        "3,4",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let body = std::fs::read_to_string(&out).unwrap();
    // header, 2 cycle pairs, then 3 instances each of cfi-k3, cfi-k4 and gm-petersen
    assert_eq!(body.lines().count(), 1 + 2 + 9);
}

#[test]
fn bad_input_fails_cleanly() {
    let out = isoread(&["decompose", "--graph", "not a graph"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!isoread(&["gen", "nonsense"]).status.success());
}
