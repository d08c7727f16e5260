use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TRIANGLE: &str = r#"{"n": 3, "directed": false, "edges": [[0, 1, 1.0], [1, 2, 2.0], [0, 2, 1.0]]}"#;
const PATH: &str = r#"{"n": 3, "directed": false, "edges": [[0, 1, 1.0], [1, 2, 1.0]]}"#;

fn netotc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netotc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tu_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/tu")
}

#[test]
fn compare_network_with_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", TRIANGLE);
    let doc = stdout_json(&netotc(&["compare", &a, &a, "--cost", "identity", "--solver", "exact"]));
    assert_eq!(doc["rho"].as_f64(), Some(0.0));
    assert_eq!(doc["solver"], "exact");
    assert!(doc["objective_history"].is_array());
}

#[test]
fn compare_with_each_solver() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", TRIANGLE);
    let b = write(dir.path(), "b.json", PATH);
    let exact = stdout_json(&netotc(&["compare", &a, &b, "--cost", "sdegree"]))["rho"]
        .as_f64()
        .unwrap();
    for solver in ["entropic", "onestep", "ot"] {
        let rho = stdout_json(&netotc(&["compare", &a, &b, "--cost", "sdegree", "--solver", solver]))["rho"]
            .as_f64()
            .unwrap();
        if solver == "ot" {
            assert!(rho <= exact + 1e-9);
        } else {
            assert!(rho >= exact - 1e-9, "{solver}: {rho} < {exact}");
        }
    }
}

#[test]
fn align_outputs_normalized_tables() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", TRIANGLE);
    let b = write(dir.path(), "b.json", PATH);
    let doc = stdout_json(&netotc(&["align", &a, &b, "--cost", "degree", "--hard"]));
    let vertex: f64 = doc["vertex_alignment"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
        .sum();
    assert!((vertex - 1.0).abs() < 1e-8);
    let edges = doc["edge_alignment"].as_array().unwrap();
    let edge: f64 = edges.iter().map(|e| e["mass"].as_f64().unwrap()).sum();
    assert!((edge - 1.0).abs() < 1e-8);
    let tri: Value = serde_json::from_str(TRIANGLE).unwrap();
    let path: Value = serde_json::from_str(PATH).unwrap();
    let has_edge = |net: &Value, u: u64, v: u64| {
        net["edges"].as_array().unwrap().iter().any(|e| {
            let (a, b) = (e[0].as_u64().unwrap(), e[1].as_u64().unwrap());
            (a, b) == (u, v) || (b, a) == (u, v)
        })
    };
    for e in edges {
        let (e1, e2) = (&e["edge1"], &e["edge2"]);
        assert!(has_edge(&tri, e1[0].as_u64().unwrap(), e1[1].as_u64().unwrap()));
        assert!(has_edge(&path, e2[0].as_u64().unwrap(), e2[1].as_u64().unwrap()));
    }
    assert_eq!(doc["hard_alignment"].as_array().unwrap().len(), 3);

    let out = netotc(&["align", &a, &b, "--cost", "degree", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kind,u,v,u_next,v_next,mass\n"));
}

#[test]
fn oracle_check_reports_no_mismatches() {
    let doc = stdout_json(&netotc(&["oracle-check", "--trials", "200", "--seed", "7"]));
    assert_eq!(doc["summary"], "0 mismatches");
    assert_eq!(doc["trials"], 200);
}

#[test]
fn missing_seed_is_a_usage_error() {
    for cmd in ["oracle-check", "isomorph", "sbm-bench", "factor-bench"] {
        let out = netotc(&[cmd, "--trials", "1"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
    }
    assert_eq!(netotc(&["compare"]).status.code(), Some(2));
    assert_eq!(netotc(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_are_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", TRIANGLE);
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"n": 2, "directed": true, "edges": [[0, 1, -1.0], [1, 0, 1.0]]}"#,
    );
    let out = netotc(&["compare", &a, &bad, "--cost", "degree"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_eq!(err["error"], "InvariantViolation");
    assert!(out.stdout.is_empty());

    let missing = dir.path().join("missing.json");
    let out = netotc(&["compare", &a, missing.to_str().unwrap(), "--cost", "degree"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["message"].is_string());

    let b = write(dir.path(), "b.json", PATH);
    let c = write(dir.path(), "c.json", r#"{"n": 2, "directed": false, "edges": [[0, 1, 1.0]]}"#);
    let out = netotc(&["compare", &b, &c, "--cost", "identity"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(serde_json::from_slice::<Value>(&out.stderr).unwrap()["error"], "DimensionMismatch");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["isomorph", "--class", "er-small-third", "--trials", "3", "--seed", "5"];
    let first = netotc(&args);
    let second = netotc(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("factor.csv");
    let out = out.to_str().unwrap();
    let args = ["factor-bench", "--sigma", "2.5,1.0", "--trials", "2", "--seed", "3", "--format", "csv", "--out", out];
    assert!(netotc(&args).status.success());
    let a = std::fs::read(out).unwrap();
    assert!(netotc(&args).status.success());
    assert_eq!(a, std::fs::read(out).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 3);
}

#[test]
fn factor_bench_exact_factors_are_recovered() {
    let out = netotc(&["factor-bench", "--sigma", "2.5", "--trials", "20", "--compatible-only", "--seed", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc[0]["summary"], "100.00 ± 0.00");
}

#[test]
fn classify_toy_dataset() {
    let dir = tu_fixtures();
    let doc = stdout_json(&netotc(&[
        "classify",
        "--dir",
        dir.to_str().unwrap(),
        "--name",
        "TOY",
        "--k",
        "1",
        "--train-fraction",
        "0.5",
        "--repeats",
        "3",
        "--seed",
        "4",
    ]));
    assert_eq!(doc["graphs"], 2);
    assert_eq!(doc["accuracies"].as_array().unwrap().len(), 3);
    let out = netotc(&["classify", "--dir", dir.to_str().unwrap(), "--name", "TOY", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(serde_json::from_slice::<Value>(&out.stderr).unwrap()["error"], "DegenerateSplit");
}
