use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carleson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(text: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text);
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn norms_of_a_small_field() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "a.json",
        r#"{"n":1,"depth":1,"values":[
            {"level":0,"index":[0],"v":1},{"level":1,"index":[0],"v":3},{"level":1,"index":[1],"v":2}]}"#,
    );
    let report = stdout_json(&run(&["norms", &file, "--p", "1"]));
    assert_eq!(report["norms"]["nt_max_lp"].as_f64(), Some(2.5));
    assert_eq!(report["exact"]["nt_max_lp"], true);
    assert_eq!(report["parameters"]["pprime"], "inf");
}

#[test]
fn norms_of_an_empty_field_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "empty.json", r#"{"n":2,"depth":2,"values":[]}"#);
    let report = stdout_json(&run(&["norms", &file]));
    let norms = report["norms"].as_object().unwrap();
    assert!(!norms.is_empty());
    assert!(norms.values().all(|v| v.as_f64() == Some(0.0)));
}

#[test]
fn norms_of_a_grid_file() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g.json");
    let out = run(&["generate", "--kind", "grid", "--depth", "3", "--seed", "4", "--out", grid.to_str().unwrap()]);
    assert!(out.status.success());
    let report = stdout_json(&run(&["norms", grid.to_str().unwrap(), "--q", "2", "--r", "1"]));
    assert_eq!(report["input"]["kind"], "grid");
    assert_eq!(report["exact"]["nt_max_dyadic_lp"], true);
    assert_eq!(report["exact"]["nt_max_continuum_lp"], false);
    for (_, v) in report["norms"].as_object().unwrap() {
        assert!(v.as_f64().unwrap() > 0.0);
    }
    assert!(report["note"].is_string());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n":1,"depth":"#);
    let neg = write(dir.path(), "neg.json", r#"{"n":1,"depth":0,"values":[{"level":0,"index":[0],"v":-1}]}"#);
    for args in [
        vec!["norms", bad.as_str()],
        vec!["norms", neg.as_str()],
        vec!["norms", "/nonexistent/field.json"],
        vec!["duality", "--bogus"],
        vec!["duality", "--p", "0.5"],
        vec!["tent", "--p", "2"],
        vec!["multiplier", "--p", "1", "--r", "2"],
        vec!["equivalence", "--c0", "1"],
        vec!["generate", "--dist", "nope"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn duality_suite_stays_below_the_bound() {
    let report = stdout_json(&run(&["duality", "--trials", "200", "--depth", "6", "--p", "2"]));
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 200);
    for row in rows {
        assert!(row["pairing_ratio"].as_f64().unwrap() <= 2.0);
        assert!(row.get("oracle_cball_ratio").is_none());
    }
    assert!(report["summary"]["pairing_ratio"]["max"].as_f64().unwrap() <= 2.0);
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn duality_on_small_trees_runs_the_oracle() {
    for p in ["1", "2", "3.5"] {
        let out = run(&["duality", "--trials", "6", "--depth", "1", "--p", p, "--format", "csv"]);
        assert!(out.status.success());
        let (header, rows) = csv_rows(&out.stdout);
        assert!(header.iter().any(|h| h == "oracle_ntball_ratio"));
        assert!(header.iter().any(|h| h == "oracle_cball_ratio"));
        assert_eq!(rows.len(), 6);
    }
}

#[test]
fn zero_trials_give_an_empty_report() {
    let report = stdout_json(&run(&["duality", "--trials", "0"]));
    assert_eq!(report["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn equivalence_defaults() {
    let out = run(&["equivalence"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 50);
    for col in ["nt_ratio", "nt_refined_ratio", "carleson_ratio", "carleson_dense_ratio"] {
        let k = header.iter().position(|h| h == col).unwrap();
        for row in &rows {
            let r: f64 = row[k].parse().unwrap();
            assert!(r > 0.0 && r.is_finite());
        }
    }
}

#[test]
fn tent_and_multiplier_columns() {
    let out = run(&["tent", "--trials", "4"]);
    let (header, rows) = csv_rows(&out.stdout);
    assert_eq!(header, ["seed", "carleson", "area", "ratio"]);
    assert_eq!(rows.len(), 4);

    let out = run(&["multiplier", "--trials", "2", "--depth", "3"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out.stdout);
    assert!(header.iter().any(|h| h == "modified_carleson"));
    assert!(header.iter().any(|h| h == "modified_ratio"));
    assert_eq!(rows.len(), 2);

    let out = run(&["multiplier", "--trials", "2", "--depth", "3", "--p", "3"]);
    let (header, _) = csv_rows(&out.stdout);
    assert!(!header.iter().any(|h| h == "modified_carleson"));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec!["duality", "--trials", "20", "--depth", "2", "--seed", "7"],
        vec!["equivalence", "--trials", "5", "--format", "json"],
        vec!["generate", "--kind", "grid", "--n", "2", "--depth", "2", "--seed", "9"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let to_file = run(&["duality", "--trials", "5", "--depth", "1", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(String::from_utf8_lossy(&to_file.stdout).contains("pairing_ratio"));
    let direct = run(&["duality", "--trials", "5", "--depth", "1"]);
    assert_eq!(fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn generated_files_round_trip_through_norms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let p = path.to_str().unwrap();
    assert!(run(&["generate", "--depth", "5", "--seed", "2", "--dist", "lognormal:0:1", "--out", p]).status.success());
    let text = fs::read_to_string(&path).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["values"].as_array().unwrap().len(), 63);
    let a = stdout_json(&run(&["norms", p, "--p", "3"]));
    let b = stdout_json(&run(&["norms", p, "--p", "3"]));
    assert_eq!(a, b);
}
