use std::io::Write;
use std::process::{Command, Output};

use alike_core::alike::is_alike;
use alike_core::format::{matrix_from_json, parse_triplets};
use alike_core::graph::Graph;
use alike_core::HypercubeContext;
use serde_json::Value;
use tempfile::NamedTempFile;

fn alike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alike"))
        .args(args)
        .env_remove("ALIKE_CAP_D")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn graph_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn dims_of_path_graph_file() {
    let f = graph_file(r#"{"n": 3, "edges": [[0, 1], [1, 2]]}"#);
    let out = alike(&["dims", "--graph", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(
        (
            v["sym"].as_u64(),
            v["antisym"].as_u64(),
            v["total"].as_u64()
        ),
        (Some(2), Some(0), Some(2))
    );
}

#[test]
fn malformed_graph_file_is_an_input_error() {
    for text in [
        r#"{"n": 2, "edges": [[0, 0]]}"#,
        "not json",
        r#"{"n": 2, "edges": [[0, 5]]}"#,
    ] {
        let f = graph_file(text);
        let out = alike(&["dims", "--graph", f.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn emitted_bases_are_alike_for_their_source() {
    let c5 = graph_file(&Graph::cycle(5).to_json());
    let path = c5.path().to_str().unwrap();
    let out = alike(&["basis", "--graph", path, "--format", "triplet"]);
    assert_eq!(out.status.code(), Some(0));
    let ms = parse_triplets(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(!ms.is_empty());
    for m in &ms {
        assert!(is_alike(&Graph::cycle(5), m).unwrap().holds());
    }

    let out = alike(&["basis", "--hypercube", "3"]);
    let q3 = HypercubeContext::new(3).unwrap().graph();
    let v = json(&out);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 7);
    for m in list {
        assert!(is_alike(&q3, &matrix_from_json(m).unwrap())
            .unwrap()
            .holds());
    }
}

#[test]
fn solve_reports_dims_and_basis() {
    let out = alike(&["solve", "--hypercube", "2", "--part", "antisym"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dims"]["total"], 4);
    assert_eq!(v["basis"].as_array().unwrap().len(), 1);
}

#[test]
fn compare_q5_all_true() {
    let out = alike(&["compare", "--hypercube", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["full", "sym", "antisym"] {
        assert_eq!(v[key], true, "{key}");
    }
}

#[test]
fn verify_q10_with_skips_passes() {
    let out = alike(&["verify", "--hypercube", "10", "--skip", "brute,idempotents"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn verify_requires_a_hypercube() {
    let f = graph_file(r#"{"n": 2, "edges": [[0, 1]]}"#);
    assert_eq!(
        alike(&["verify", "--graph", f.path().to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        alike(&["verify", "--hypercube", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn cap_env_var_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_alike"))
        .args(["dims", "--hypercube", "3"])
        .env("ALIKE_CAP_D", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
