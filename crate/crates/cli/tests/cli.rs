use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latin-parity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is one JSON object");
    v["error"].clone()
}

fn temp(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("latin-parity-{}-{name}", std::process::id()));
    let _ = std::fs::remove_file(&p);
    p
}

#[test]
fn verify_all_order_three() {
    let out = run(&["verify", "--mode", "all", "-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let tasks: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["task"].as_str().unwrap())
        .collect();
    for t in [
        "macmahon",
        "det_power",
        "per_det",
        "zappa",
        "thm41",
        "prop42",
        "drisko",
        "classes",
        "lemma32",
        "orbits",
    ] {
        assert!(tasks.contains(&t), "missing {t}");
    }
    for r in v.as_array().unwrap() {
        assert_ne!(r["status"], "fail");
        for key in [
            "params",
            "computed",
            "expected",
            "threads",
            "version",
            "elapsed_ms",
        ] {
            assert!(r.get(key).is_some(), "{key} missing");
        }
        assert!(r["expected"]["provenance"].is_object());
    }
}

#[test]
fn drisko_sum_json() {
    let out = run(&["sum", "--mode", "drisko", "-p", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["computed"]["raw_sum"], "12");
    assert_eq!(v["computed"]["residue"], "1");
    assert_eq!(v["status"], "discrepancy-documented");
    assert_eq!(v["expected"]["provenance"]["residue_as_printed"], "paper");
    assert_eq!(v["expected"]["provenance"]["residue"], "derived");
}

#[test]
fn sums_report_scaled_values() {
    let v = json(&run(&["sum", "--mode", "det_n", "-n", "4"]));
    assert_eq!(v["computed"]["scaled_value"], "576");
    assert_eq!(v["status"], "pass");
    let v = json(&run(&["sum", "--mode", "per_det", "-n", "3"]));
    assert_eq!(v["computed"]["scaled_value"], "-1");
    let v = json(&run(&["sum", "--mode", "classes", "-p", "3"]));
    assert_eq!(v["computed"]["residue"], "2");
    assert_eq!(v["expected"]["provenance"]["residue"], "paper");
}

#[test]
fn enumerate_cap_and_counts() {
    let out = run(&["enumerate", "-n", "7"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["kind"], "resource_cap");
    assert!(out.stdout.is_empty());

    let v = json(&run(&["enumerate", "-n", "4"]));
    assert_eq!(v["computed"]["total"], "576");
    assert_eq!(v["computed"]["reduced"], "4");
    assert_eq!(v["computed"]["at"], "4");

    let v = json(&run(&[
        "enumerate",
        "-n",
        "3",
        "--filter",
        "reduced",
        "--list",
    ]));
    assert_eq!(v["computed"]["listed"], "1");
    assert_eq!(
        v["details"][0]["rows"],
        serde_json::json!([[1, 2, 3], [2, 3, 1], [3, 1, 2]])
    );
}

#[test]
fn exit_codes() {
    let bad = run(&["verify", "--mode", "nonsense", "-n", "3"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(stderr_error(&bad)["exit_code"], 2);
    let even = run(&["verify", "--mode", "per_det", "-n", "4"]);
    assert_eq!(even.status.code(), Some(2));
    let missing = run(&["verify", "--mode", "drisko"]);
    assert_eq!(missing.status.code(), Some(2));
    let heavy = run(&["sum", "--mode", "per_det", "-n", "5"]);
    assert_eq!(heavy.status.code(), Some(3));
    let big = run(&["sum", "--mode", "classes", "-p", "7"]);
    assert_eq!(big.status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn deterministic_output_and_thread_independence() {
    let a = run(&[
        "verify",
        "--mode",
        "prop42",
        "-n",
        "3",
        "--seed",
        "5",
        "--no-timing",
        "--threads",
        "1",
    ]);
    let b = run(&[
        "verify",
        "--mode",
        "prop42",
        "-n",
        "3",
        "--seed",
        "5",
        "--no-timing",
        "--threads",
        "1",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let one = json(&run(&[
        "sum",
        "--mode",
        "det_n",
        "-n",
        "4",
        "--threads",
        "1",
    ]));
    let eight = json(&run(&[
        "sum",
        "--mode",
        "det_n",
        "-n",
        "4",
        "--threads",
        "8",
    ]));
    assert_eq!(one["computed"], eight["computed"]);
    let other_seed = run(&[
        "verify",
        "--mode",
        "prop42",
        "-n",
        "3",
        "--seed",
        "6",
        "--no-timing",
    ]);
    assert_ne!(a.stdout, other_seed.stdout);
}

#[test]
fn csv_matches_json() {
    let v = json(&run(&["verify", "--mode", "per_det", "-n", "3"]));
    let out = run(&["verify", "--mode", "per_det", "-n", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("task,quantity,computed,expected,provenance,status")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let computed = v["computed"].as_object().unwrap();
    assert_eq!(rows.len(), computed.len());
    for row in rows {
        assert_eq!(row[0], "per_det");
        assert_eq!(Some(row[2]), computed[row[1]].as_str());
        if let Some(e) = v["expected"].get(row[1]) {
            assert_eq!(Some(row[3]), e.as_str());
        }
        assert_eq!(row[5], "pass");
    }
}

#[test]
fn text_and_out_file() {
    let path = temp("out.txt");
    let out = run(&[
        "verify",
        "--mode",
        "thm41",
        "-n",
        "3",
        "--format",
        "text",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("thm41: pass"), "{text}");
    assert!(text.contains("coefficient=24"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn cache_round_trip() {
    let cache = temp("cache.jsonl");
    let c = cache.to_str().unwrap();
    let args = [
        "verify",
        "--mode",
        "all",
        "-n",
        "3",
        "--no-timing",
        "--cache",
        c,
    ];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    let lines = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(lines.lines().count(), 1);
    let record: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(record["key"]["mode"], "all");
    assert!(record["key"]["version"].is_string());

    let hit = run(&args);
    assert_eq!(hit.stdout, first.stdout);
    let mut verify_args = args.to_vec();
    verify_args.push("--verify-cache");
    let checked = run(&verify_args);
    assert_eq!(checked.status.code(), Some(0));
    assert_eq!(checked.stdout, first.stdout);
    assert_eq!(std::fs::read_to_string(&cache).unwrap().lines().count(), 1);

    let tampered = lines.replace(
        "\"coefficient_per_n\":\"12\"",
        "\"coefficient_per_n\":\"13\"",
    );
    assert_ne!(tampered, lines);
    std::fs::write(&cache, tampered).unwrap();
    let bad = run(&verify_args);
    assert_eq!(bad.status.code(), Some(4));
    assert_eq!(stderr_error(&bad)["kind"], "internal");
    std::fs::remove_file(cache).unwrap();
}

#[test]
fn mismatch_exit_code_from_cached_failure() {
    let cache = temp("fail.jsonl");
    let c = cache.to_str().unwrap();
    let args = [
        "verify",
        "--mode",
        "thm41",
        "-n",
        "1",
        "--no-timing",
        "--cache",
        c,
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&cache)
        .unwrap()
        .replace("\"status\":\"pass\"", "\"status\":\"fail\"");
    std::fs::write(&cache, text).unwrap();
    assert_eq!(run(&args).status.code(), Some(1));
    std::fs::remove_file(cache).unwrap();
}
