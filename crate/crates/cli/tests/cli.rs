use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ksquare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksquare")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

const IDENTITY: &str = r#"{"p":2,"k":2,"images":[[1,1],[1,2],[2,1],[2,2]]}"#;
// swaps (1,2) and (2,1): its block transpose is not a permutation
const NOT_BIUNITARY: &str = r#"{"p":2,"k":2,"images":[[1,1],[2,1],[1,2],[2,2]]}"#;

#[test]
fn verify_identity_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", IDENTITY);
    let out = ksquare(&["verify", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v.as_object().unwrap();
    assert!(checks.len() > 10);
    assert!(checks.values().all(|c| c["pass"] == true));
}

#[test]
fn verify_non_biunitary_is_violation() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", NOT_BIUNITARY);
    let out = ksquare(&["verify", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["biunitary"]["pass"], false);
}

#[test]
fn enumerate_two_by_two() {
    let out = ksquare(&["enumerate", "--p", "2", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let all = v.as_array().unwrap();
    assert_eq!(all.len(), 12);
    let keys: Vec<String> = all.iter().map(|u| u["images"].to_string()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys.len(), sorted.len());
    let canon = ksquare(&["enumerate", "--p", "2", "--k", "2", "--canonical"]);
    assert!(json(&canon).as_array().unwrap().len() < 12);
}

#[test]
fn from_group_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "s3.json", r#"{"k":3,"generators":[[2,1,3],[2,3,1]]}"#);
    let out = ksquare(&["from-group", &g]);
    assert_eq!(out.status.code(), Some(0));
    let u = write(dir.path(), "u.json", std::str::from_utf8(&out.stdout).unwrap());
    let inv = json(&ksquare(&["invariants", &u]));
    assert_eq!(inv["group"]["order"], 6);
    assert_eq!(inv["omega"], 1);
    assert_eq!(inv["group"]["stabilizers"][0], serde_json::json!([[1, 2, 3], [1, 3, 2]]));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "broken.json", "{\n  \"p\": 2,\n  \"k\" 2\n}");
    let out = ksquare(&["verify", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("column"), "{err}");
}

#[test]
fn schema_errors_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "short.json", r#"{"p":2,"k":2,"images":[[1,1]]}"#);
    assert_eq!(ksquare(&["extract", &f]).status.code(), Some(2));
    let g = write(dir.path(), "g.json", r#"{"k":3,"generators":[[1,2]]}"#);
    assert_eq!(ksquare(&["from-group", &g]).status.code(), Some(2));
    assert_eq!(ksquare(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn capacity_guards_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "s3.json", r#"{"k":3,"generators":[[2,1,3],[2,3,1]]}"#);
    assert_eq!(ksquare(&["ladder", &g, "--depth", "4"]).status.code(), Some(3));
    assert_eq!(ksquare(&["enumerate", "--p", "4", "--k", "4"]).status.code(), Some(3));
    assert_eq!(ksquare(&["bisch", "--p", "3", "--k", "3", "--depth", "3"]).status.code(), Some(3));
}

#[test]
fn ladder_dot_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "s2.json", r#"{"k":2,"generators":[[2,1]]}"#);
    let dot = ksquare(&["ladder", &g, "--format", "dot"]);
    assert_eq!(dot.status.code(), Some(0));
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 4);
    let out = ksquare(&["ladder", &g, "--depth", "2"]);
    let v = json(&out);
    assert_eq!(v["markov"]["beta"], "4");
    assert_eq!(v["levels"].as_array().unwrap().len(), 3);
    assert!(v["report"].as_object().unwrap().values().all(|c| c["pass"] == true));
}

#[test]
fn dot_only_for_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", IDENTITY);
    assert_eq!(ksquare(&["verify", &f, "--format", "dot"]).status.code(), Some(2));
}

#[test]
fn bisch_modes() {
    let out = ksquare(&["bisch", "--p", "2", "--k", "2", "--depth", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["trace"], "1/2");
    assert_eq!(v["p_n"][1]["trace"], "1/2");
    assert_eq!(v["p_n"][1]["dim"], 16);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", IDENTITY);
    assert_eq!(ksquare(&["bisch", &f]).status.code(), Some(0));
    assert_eq!(ksquare(&["bisch"]).status.code(), Some(2));
}

#[test]
fn text_format_shows_square_layout() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", IDENTITY);
    let out = ksquare(&["verify", &f, "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("U(1⊗M_k)U* ⊂ M_p⊗M_k"));
    assert!(text.contains("PASS squares.sq.commuting"));
}

#[test]
fn batch_output_is_ordered_and_job_independent() {
    let dir = tempfile::tempdir().unwrap();
    let all = ksquare(&["enumerate", "--p", "2", "--k", "3"]);
    let f = write(dir.path(), "all.json", std::str::from_utf8(&all.stdout).unwrap());
    for cmd in ["verify", "extract", "invariants", "relcomm", "bisch", "ladder", "report"] {
        let one = ksquare(&[cmd, &f, "--jobs", "1"]);
        let four = ksquare(&[cmd, &f, "--jobs", "4"]);
        assert_eq!(one.status.code(), Some(0), "{cmd}");
        assert_eq!(one.stdout, four.stdout, "{cmd}");
    }
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_ksquare"))
        .args(["extract", "--format", "text"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(IDENTITY.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("lambda_1 = [1,2]"));
}
