use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn tripack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripack"))
        .args(args)
        .env_remove("TRIPACK_ORACLE_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn counterexample_file(dir: &TempDir) -> String {
    let path = dir.path().join("counterexample.json");
    let o = tripack(&["generate", "--kind", "counterexample", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    path.to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_counterexample_best() {
    let dir = TempDir::new().unwrap();
    let f = counterexample_file(&dir);
    let o = tripack(&["solve", "--input", &f, "--alg", "best", "--with-oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["weight"], "2");
    assert_eq!(v["opt"], "2");
    assert_eq!(v["weights"], json!(["2", "2", "2"]));
    assert_eq!(v["algorithm"], "alg1");
}

#[test]
fn solve_counterexample_third_algorithm_exact() {
    let dir = TempDir::new().unwrap();
    let f = counterexample_file(&dir);
    let o = tripack(&["solve", "--input", &f, "--alg", "3", "--star-backend", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["weight"], "2");
}

#[test]
fn solve_zero_instance() {
    let dir = TempDir::new().unwrap();
    let zeros = vec![vec![0; 9]; 9];
    let f = write(dir.path(), "zero.json", &json!({"n": 9, "weights": zeros}));
    for alg in ["1", "2", "3", "best"] {
        let o = tripack(&["solve", "--input", &f, "--alg", alg]);
        assert_eq!(o.status.code(), Some(0), "alg {alg}");
        let v = json_out(&o);
        assert_eq!(v["weight"], "0");
        let mut seen: Vec<u64> = v["packing"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|p| p.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()))
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..9).collect::<Vec<_>>());
    }
}

#[test]
fn check_lemmas_counterexample() {
    let dir = TempDir::new().unwrap();
    let f = counterexample_file(&dir);
    let o = tripack(&["check-lemmas", "--input", &f]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 15);
    assert!(checks.iter().all(|c| c["pass"] == json!(true)));
}

#[test]
fn check_lemmas_generated() {
    let o = tripack(&["check-lemmas", "--kind", "uniform-int", "--n", "9", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_cert_default() {
    let o = tripack(&["verify-cert"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("objective 10/17"));
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 43);
}

#[test]
fn verify_cert_scaled_file() {
    let dir = TempDir::new().unwrap();
    let mut lambdas = vec![json!(0); 55];
    let scaled: [(usize, i64); 34] = [
        (1, 72), (2, 72), (3, 9), (4, 54), (14, 54), (15, 54), (16, 54), (17, 54), (18, 54), (19, 36),
        (20, 50), (21, 32), (25, 6), (26, 54), (27, 54), (28, 54), (30, 18), (32, 24), (35, 30), (37, 6),
        (38, 12), (39, 96), (40, 60), (41, 18), (42, 60), (43, 60), (45, 30), (46, 14), (47, 32), (49, 18),
        (52, 22), (53, 28), (54, 50), (55, 32),
    ];
    for (i, v) in scaled {
        lambdas[i - 1] = json!(v);
    }
    let f = write(dir.path(), "cert.json", &json!({"lambdas": lambdas.clone(), "scale": 153}));
    let o = tripack(&["verify-cert", "--lambda-file", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("objective 10/17"));

    // same certificate as p/q strings
    let pq: Vec<Value> = lambdas.iter().map(|v| json!(format!("{}/153", v.as_i64().unwrap()))).collect();
    let f = write(dir.path(), "cert_pq.json", &json!({ "lambdas": pq }));
    assert_eq!(tripack(&["verify-cert", "--lambda-file", &f]).status.code(), Some(0));

    lambdas[0] = json!(130);
    let f = write(dir.path(), "bad.json", &json!({"lambdas": lambdas, "scale": 153}));
    let o = tripack(&["verify-cert", "--lambda-file", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violated (y)"));
}

#[test]
fn verify_cert_bad_file_is_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "short.json", &json!({"lambdas": [1, 2, 3]}));
    assert_eq!(tripack(&["verify-cert", "--lambda-file", &f]).status.code(), Some(2));
}

#[test]
fn emit_lp() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("lp.txt");
    let o = tripack(&["verify-cert", "--emit-lp", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(p).unwrap();
    assert!(text.starts_with("minimize y"));
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with('C')).count(), 55);
}

#[test]
fn bench_csv_reproducible() {
    let args = ["bench", "--kind", "uniform-int", "--n", "9", "--count", "6", "--seed", "42", "--with-oracle", "--with-lemmas"];
    let a = tripack(&args);
    let b = tripack(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(
        lines[0],
        "instance_id,seed,n,w_p1,w_p2,w_p3,w_best,opt,ratio_num,ratio_den,lemma_failures,millis"
    );
    assert!(lines[1..].iter().all(|l| l.ends_with(",0,0")));
}

#[test]
fn bench_zero_one_json() {
    let o = tripack(&["bench", "--kind", "zero-one", "--n", "6", "--count", "20", "--seed", "7", "--with-oracle", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["records"].as_array().unwrap().len(), 20);
}

#[test]
fn bench_empty() {
    let o = tripack(&["bench", "--count", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(tripack(&["solve", "--input", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(tripack(&["frobnicate"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_tripack"))
        .args(["oracle", "--kind", "uniform-int", "--n", "9"])
        .env("TRIPACK_ORACLE_LIMIT", "6")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kind_alias() {
    let a = tripack(&["generate", "--kind", "fig1"]);
    let b = tripack(&["generate", "--kind", "counterexample"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_counterexample() {
    let dir = TempDir::new().unwrap();
    let f = counterexample_file(&dir);
    let o = tripack(&["oracle", "--input", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["opt"], "2");
}

#[test]
fn generate_metric_round_trips() {
    let o = tripack(&["generate", "--kind", "metric", "--n", "6", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["n"], 6);
    assert_eq!(v["weights"].as_array().unwrap().len(), 6);
}
