use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn choquet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choquet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const POISSON2: &str = r#"{"lattice":"powerset:2","direction":"inc",
  "values":{"{}":"1/1","{a}":"1/2","{b}":"2/3","{a,b}":"1/3"}}"#;

#[test]
fn exact_suite_exits_zero() {
    let out = choquet(&["suite", "--suites", "mobius_roundtrip"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["suites"][0]["checks"].as_array().unwrap().len(), 200);
}

#[test]
fn monte_carlo_without_seed_is_a_config_error() {
    let out = choquet(&["suite", "--suites", "poisson_mc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let bad = choquet(&["suite", "--suites", "no_such_suite"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn corrupted_fixture_names_witness() {
    let dir = TempDir::new().unwrap();
    let text = include_str!("../fixtures/poisson3.json").replace(r#""{a,b}": "1/3""#, r#""{a,b}": "2/7""#);
    let fx = write(dir.path(), "bad.json", &text);
    let report = dir.path().join("r.json");
    let out = choquet(&[
        "suite",
        "--suites",
        "fixtures",
        "--fixtures",
        fx.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let checks = r["suites"][0]["checks"].as_array().unwrap();
    let exp = checks
        .iter()
        .find(|c| c["name"] == "poisson3:exponential_valuation")
        .unwrap();
    assert_eq!(exp["pass"], false);
    assert_eq!(exp["got"]["witness"]["labels"]["set"], serde_json::json!(["{a}", "{b}"]));
    assert!(dir.path().join("r.json.log").exists());
}

#[test]
fn empty_suite_list_gives_empty_report() {
    let out = choquet(&["suite"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["suites"], serde_json::json!([]));
    assert_eq!(r["pass"], true);
}

#[test]
fn config_file_and_csv_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"seed": 3, "suites": ["partition"], "format": "csv"}"#);
    let out = choquet(&["suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 101);
    let unknown = write(dir.path(), "bad.json", r#"{"suites": [], "tolerance": 3}"#);
    assert_eq!(choquet(&["suite", "--config", unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for p in &paths {
        let out = choquet(&[
            "suite",
            "--suites",
            "poisson_mc,exp_valuation",
            "--seed",
            "11",
            "--samples",
            "2000",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.code().is_some_and(|c| c <= 1));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    assert!(!String::from_utf8(a).unwrap().contains("written_at"));
}

#[test]
fn help_lists_every_flag() {
    let out = choquet(&["suite", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--config", "--suites", "--seed", "--z", "--output", "--format", "--bonferroni", "--fixtures", "--samples"] {
        assert!(text.contains(flag), "{flag} missing");
    }
    let top = String::from_utf8(choquet(&["--help"]).stdout).unwrap();
    for sub in ["represent", "classify", "simulate", "lfv", "suite"] {
        assert!(top.contains(sub));
    }
}

#[test]
fn represent_and_classify() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", POISSON2);
    let out = choquet(&["represent", "--input", f.to_str().unwrap(), "--mode", "monotone"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["transcript"]["total_mass"], "1/1");
    assert_eq!(doc["transcript"]["linear_solve"], "unique_match");
    assert_eq!(doc["measure"]["weights"]["{a}"], "1/6");

    let out = choquet(&["classify", "--input", f.to_str().unwrap(), "--class", "exponential_valuation"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["holds"], true);
    let out = choquet(&["classify", "--input", f.to_str().unwrap(), "--class", "valuation"]);
    assert_eq!(json_of(&out)["holds"], false);
}

#[test]
fn simulate_with_batches() {
    let dir = TempDir::new().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"type":"compound","ground":["a","b","c"],"grains":[[["a","b"],"1/2"],[["c"],"1/4"]]}"#,
    );
    let q = write(dir.path(), "q.json", r#"["a"]"#);
    let csv = dir.path().join("b.csv");
    let out = choquet(&[
        "simulate",
        "--model",
        m.to_str().unwrap(),
        "--q",
        q.to_str().unwrap(),
        "--n",
        "25000",
        "--seed",
        "5",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    let doc = json_of(&out);
    assert_eq!(doc["exact"], false);
    assert_eq!(doc["n"], 25000);
    let rows: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(rows.len(), 4);
    let total: u64 = rows[1..]
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, doc["count"].as_u64().unwrap());
}

#[test]
fn lfv_builtins() {
    let dir = TempDir::new().unwrap();
    let w = write(dir.path(), "w.json", r#"{"windows":[["a","b"]]}"#);
    let out = choquet(&["lfv", "--phi", "poisson5", "--window", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["verdict"], "pass");
    assert_eq!(doc["exact"], true);

    let out = choquet(&["lfv", "--phi", "solid5", "--window", w.to_str().unwrap(), "--nmax", "1"]);
    let doc = json_of(&out);
    assert_eq!(doc["verdict"], "fail");
    assert_eq!(doc["counterexample"]["value"], "0/1");
}
