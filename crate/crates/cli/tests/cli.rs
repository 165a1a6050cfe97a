use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn psigma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psigma")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn thm_n3_passes_and_is_deterministic() {
    let args = ["verify", "thm-n3", "--mode", "random", "--samples", "50", "--seed", "3"];
    let a = psigma(&args);
    let b = psigma(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let (ja, jb) = (json(&a), json(&b));
    assert_eq!(ja["pass"], Value::Bool(true));
    assert_eq!(ja["seed"], 3);
    assert_eq!(without_time(ja), without_time(jb));
}

#[test]
fn prop47_report() {
    let out = psigma(&["verify", "prop47", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let cases = v["cases"].as_array().unwrap();
    assert!(cases.iter().all(|c| c["pass"] == Value::Bool(true)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pass"));
}

#[test]
fn remark48_reports_h1_and_rejects_large_epsilon() {
    let out = psigma(&["verify", "remark48", "--epsilon", "1/1000"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["info"]["H1"].is_object());
    assert_eq!(psigma(&["verify", "remark48", "--epsilon", "10"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(psigma(&["verify", "prop47", "--n", "9"]).status.code(), Some(2));
    assert_eq!(psigma(&["verify", "remark48", "--epsilon", "x/y"]).status.code(), Some(2));
    assert_eq!(psigma(&["verify", "nothing"]).status.code(), Some(2));
    assert_eq!(psigma(&["homology", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(psigma(&["complex", "ideal", "--n", "3", "--mode", "ascending"]).status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    assert!(psigma(&["complex", "ideal", "--n", "4", "--mode", "positive", "--out", file.to_str().unwrap()])
        .status
        .success());
    let out = psigma(&["homology", file.to_str().unwrap(), "--budget", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn complex_then_homology() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("i3.json");
    let out = psigma(&["complex", "ideal", "--n", "3", "--mode", "positive", "--out", file.to_str().unwrap()]);
    assert!(out.status.success());
    let complex: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(complex["vertices"], 9);
    let h = json(&psigma(&["homology", file.to_str().unwrap()]));
    assert_eq!(h["reduced"], Value::Bool(true));
    let dims = h["dims"].as_array().unwrap();
    let betti: Vec<(i64, u64)> = dims.iter().map(|d| (d["k"].as_i64().unwrap(), d["betti"].as_u64().unwrap())).collect();
    assert_eq!(betti, vec![(-1, 0), (0, 0), (1, 4)]);
}

#[test]
fn ascending_ideal_complex_from_character_file() {
    let dir = tempfile::tempdir().unwrap();
    let chi = dir.path().join("chi.json");
    let entries: Vec<Value> = (1..=3)
        .flat_map(|i| (1..=3).filter(move |&j| j != i).map(move |j| serde_json::json!({"i": i, "j": j, "num": 2, "den": 3})))
        .collect();
    std::fs::write(&chi, serde_json::json!({"n": 3, "entries": entries}).to_string()).unwrap();
    let out = psigma(&["complex", "ideal", "--n", "3", "--mode", "ascending", "--character", chi.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pos = psigma(&["complex", "ideal", "--n", "3", "--mode", "positive"]);
    let (a, b) = (json(&out), json(&pos));
    assert_eq!(a["maximal_faces"], b["maximal_faces"]);
    let wrong = psigma(&["complex", "ideal", "--n", "4", "--mode", "ascending", "--character", chi.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn forest_complex_of_fixture_is_a_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("forest.json");
    let graph = fixture("twelve_cladodes.json");
    let out = psigma(&["complex", "forest", graph.to_str().unwrap(), "--out", file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = json(&psigma(&["homology", file.to_str().unwrap()]));
    let nonzero: Vec<&Value> = h["dims"].as_array().unwrap().iter().filter(|d| d["betti"] != 0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0]["k"], 7);
    assert_eq!(nonzero[0]["betti"], 1);
}
