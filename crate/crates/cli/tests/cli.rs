//! End-to-end tests of the `survest` binary: subcommands, formats, exit
//! codes, config-file handling and output determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_survest"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("survest-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_small_csv(dir: &Path) -> PathBuf {
    let path = dir.join("pop.csv");
    std::fs::write(&path, "y,x,phi\n1.0,2.0,1\n2.0,4.0,0\n3.0,6.0,1\n4.0,8.0,0\n").unwrap();
    path
}

#[test]
fn summarize_echoes_population_size() {
    let dir = temp_dir("sum");
    let path = write_small_csv(&dir);
    let out = run(&[
        "summarize",
        "--input",
        path.to_str().unwrap(),
        "--x-col",
        "x",
        "--phi-col",
        "phi",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("N"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("N") && l.contains('4')));
    assert!(text.contains("ρ_pb"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn summarize_marks_absent_columns_unset() {
    let dir = temp_dir("unset");
    let path = dir.join("pop.csv");
    std::fs::write(&path, "y\n1.5\n2.5\n3.5\n").unwrap();
    let out = run(&["summarize", "--input", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.contains("xbar") && l.contains("unset")));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn summarize_rejects_malformed_csv_with_row_and_column() {
    let dir = temp_dir("bad");
    let path = dir.join("pop.csv");
    std::fs::write(&path, "y\n1.0\nnot-a-number\n3.0\n").unwrap();
    let out = run(&["summarize", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("row 2") && err.contains('y'), "{err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn theory_lists_and_renders_registry_tables() {
    let out = run(&["theory", "--list"]);
    assert!(out.status.success());
    let ids = stdout(&out);
    assert!(ids.contains("ch1-5.1") && ids.contains("ch6-4.2"));
    for id in ids.lines().filter(|l| !l.is_empty()) {
        let out = run(&["theory", "--table", id]);
        assert!(out.status.success(), "table {id}: {}", stderr(&out));
    }
    let out = run(&["theory", "--table", "ch1-5.1"]);
    let text = stdout(&out);
    assert!(text.contains("t_NG") && text.contains("printed") && text.contains("computed"));
    // known-discrepancy tables carry an explicit marker
    let out = run(&["theory", "--table", "ch3-6.1"]);
    assert!(stdout(&out).contains("KNOWN DISCREPANCY"));
}

#[test]
fn theory_rejects_unknown_table() {
    let out = run(&["theory", "--table", "ch7-1.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theory_from_scalars_reproduces_optimum_pre() {
    let out = run(&[
        "theory",
        "--scalars",
        "n=89,ybar=3.36,p=0.1236,rho-pb=0.766,cy=0.604,cp=2.19,beta2-phi=6.23181",
        "--n",
        "23",
        "--estimators",
        "mean-per-unit,naik-gupta-ratio,exp-combined-attr{alpha=0.71125}",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let pre = rows[2]["pre_vs_baseline"].as_f64().unwrap();
    assert!((pre - 241.98).abs() < 0.05, "optimum PRE = {pre}");
    // missing scalar is a config error
    let out = run(&[
        "theory",
        "--scalars",
        "n=89,ybar=3.36,cy=0.604",
        "--n",
        "23",
        "--estimators",
        "naik-gupta-ratio",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theory_accepts_a_population_source() {
    let dir = temp_dir("theory-data");
    // y not exactly proportional to x, so every theory MSE is positive
    let path = dir.join("pop.csv");
    std::fs::write(
        &path,
        "y,x\n1.1,2.0\n2.3,4.1\n2.9,6.2\n4.2,7.9\n5.1,10.3\n6.0,11.8\n",
    )
    .unwrap();
    let out = run(&[
        "theory",
        "--input",
        path.to_str().unwrap(),
        "--x-col",
        "x",
        "--n",
        "3",
        "--estimators",
        "mean-per-unit,classical-ratio-aux",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["pre_vs_baseline"].as_f64(), Some(100.0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = temp_dir("det");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    let base = [
        "simulate",
        "--synthesize",
        "n=400,ybar=10,cy=0.5,cx=0.8,rho=0.7,xbar=2",
        "--seed",
        "77",
        "--n",
        "20",
        "--replications",
        "4000",
        "--estimators",
        "mean-per-unit,classical-ratio-aux,exp-ratio-aux{a=1,b=0}",
        "--format",
        "json",
    ];
    let out1 = bin().args(base).arg("--output").arg(&a).output().unwrap();
    assert!(out1.status.success(), "{}", stderr(&out1));
    let out2 = bin()
        .args(base)
        .args(["--threads", "4"])
        .arg("--output")
        .arg(&b)
        .output()
        .unwrap();
    assert!(out2.status.success(), "{}", stderr(&out2));
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must give identical reports");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_csv_round_trips_json_values() {
    let dir = temp_dir("csv");
    let base = [
        "simulate",
        "--synthesize",
        "n=300,ybar=5,cy=0.4,cx=0.6,rho=0.6,xbar=3",
        "--seed",
        "11",
        "--n",
        "15",
        "--replications",
        "2000",
        "--estimators",
        "mean-per-unit,classical-ratio-aux",
    ];
    let json_out = bin().args(base).args(["--format", "json"]).output().unwrap();
    assert!(json_out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    let csv_out = bin().args(base).args(["--format", "csv"]).output().unwrap();
    assert!(csv_out.status.success());
    let text = stdout(&csv_out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let mse_idx = headers.iter().position(|h| h == "emp_mse").unwrap();
    for (i, record) in reader.records().enumerate() {
        let record = record.unwrap();
        let parsed: f64 = record.get(mse_idx).unwrap().parse().unwrap();
        let exact = value["report"]["estimators"][i]["empirical_mse"]
            .as_f64()
            .unwrap();
        assert_eq!(parsed, exact, "CSV float must round-trip exactly");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_single_replication_leaves_se_unset() {
    let out = run(&[
        "simulate",
        "--synthesize",
        "n=100,ybar=5,cy=0.4",
        "--seed",
        "5",
        "--n",
        "10",
        "--replications",
        "1",
        "--estimators",
        "mean-per-unit",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value["report"]["estimators"][0]["se_mean"].is_null());
    assert!(value["report"]["estimators"][0]["se_mse"].is_null());
}

#[test]
fn simulate_abort_policy_fails_with_count() {
    // one attribute-positive unit among 50, n = 10: most samples carry no
    // attribute and the ratio is undefined
    let dir = temp_dir("abort");
    let path = dir.join("pop.csv");
    let mut csv = String::from("y,phi\n");
    for i in 0..50 {
        csv.push_str(&format!("{}.0,{}\n", i + 1, if i == 7 { 1 } else { 0 }));
    }
    std::fs::write(&path, csv).unwrap();
    let out = run(&[
        "simulate",
        "--input",
        path.to_str().unwrap(),
        "--phi-col",
        "phi",
        "--seed",
        "3",
        "--n",
        "10",
        "--replications",
        "100",
        "--estimators",
        "naik-gupta-ratio",
        "--policy",
        "abort",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("undefined"), "{}", stderr(&out));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_reports_exact_zero_rows() {
    let dir = temp_dir("oracle");
    let path = write_small_csv(&dir);
    let out = run(&[
        "oracle",
        "--input",
        path.to_str().unwrap(),
        "--x-col",
        "x",
        "--n",
        "2",
        "--estimators",
        "mean-per-unit,classical-ratio-aux",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = value["estimators"].as_array().unwrap();
    assert!(rows[0]["exact_bias"].as_f64().unwrap().abs() < 1e-14);
    // y is exactly 0.5·x, so the ratio estimator has zero bias and MSE
    assert!(rows[1]["exact_bias"].as_f64().unwrap().abs() < 1e-14);
    assert!(rows[1]["exact_mse"].as_f64().unwrap() < 1e-28);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_enforces_enumeration_cap() {
    let dir = temp_dir("cap");
    let path = dir.join("pop.csv");
    let mut csv = String::from("y\n");
    for i in 0..40 {
        csv.push_str(&format!("{}.5\n", i));
    }
    std::fs::write(&path, csv).unwrap();
    let out = run(&[
        "oracle",
        "--input",
        path.to_str().unwrap(),
        "--n",
        "20",
        "--estimators",
        "mean-per-unit",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("cap"), "{}", stderr(&out));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_handles_medium_enumeration_under_default_cap() {
    // C(20, 10) = 184756 subsets
    let dir = temp_dir("medium");
    let path = dir.join("pop.csv");
    let mut csv = String::from("y\n");
    for i in 0..20 {
        csv.push_str(&format!("{}\n", (i * 13 % 7) + 1));
    }
    std::fs::write(&path, csv).unwrap();
    let out = run(&[
        "oracle",
        "--input",
        path.to_str().unwrap(),
        "--n",
        "10",
        "--estimators",
        "mean-per-unit",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["n_subsets"].as_u64(), Some(184_756));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = temp_dir("config");
    let pop = write_small_csv(&dir);
    let config = dir.join("run.toml");
    std::fs::write(
        &config,
        format!(
            r#"
[population]
input = "{}"
x-col = "x"

[design]
n = 2

[run]
replications = 50
seed = 9
estimators = ["mean-per-unit"]

[output]
format = "json"
"#,
            pop.display()
        ),
    )
    .unwrap();
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["report"]["replications"].as_u64(), Some(50));
    // flag overrides the file
    let out = bin()
        .args(["simulate", "--config", config.to_str().unwrap()])
        .args(["--replications", "75"])
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["report"]["replications"].as_u64(), Some(75));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_estimator_is_config_error() {
    let out = run(&[
        "simulate",
        "--synthesize",
        "n=100,ybar=5,cy=0.4",
        "--n",
        "10",
        "--replications",
        "10",
        "--estimators",
        "definitely-not-real",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
