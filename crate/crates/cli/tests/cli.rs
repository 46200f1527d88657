use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("pqn-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn pqn(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pqn")).current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn verify_labels_das_okubo() {
    let s = Scratch::new("verify");
    let (code, out) = pqn(&s.0, &["verify", "--model", "das-okubo", "--n", "3"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["model"], "das-okubo");
    assert_eq!(r["tables"]["label"], "PN");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true && c["witness"].is_null()));
}

#[test]
fn deform_then_involutivity_and_recursion() {
    let s = Scratch::new("chain");
    let (code, _) = pqn(&s.0, &["deform", "--model", "das-okubo", "--n", "3", "--two-form", "omega1", "--out", "nminus.json", "--report", "d.json"]);
    assert_eq!(code, 0);
    let d = json(&std::fs::read_to_string(s.path("d.json")).unwrap());
    assert_eq!(d["tables"]["label"], "PqN");

    let (code, out) = pqn(&s.0, &["involutivity", "--model", "nminus.json", "--kmax", "6"]);
    assert_eq!(code, 0);
    let table = &json(&out)["tables"]["involutivity"];
    assert_eq!(table.as_array().unwrap().len(), 6);
    assert!(table.as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).all(|e| e == "0"));

    assert_eq!(pqn(&s.0, &["identities", "--model", "nminus.json", "--suite", "recursion", "--kmax", "5"]).0, 0);
    for suite in ["factorization", "triple", "nstar-dh"] {
        assert_eq!(pqn(&s.0, &["identities", "--model", "nminus.json", "--suite", suite, "--kmax", "4"]).0, 0, "{suite}");
    }
    let (code, _) = pqn(&s.0, &["identities", "--model", "nminus.json", "--suite", "two-form", "--two-form", "omega1", "--kmax", "4"]);
    assert_eq!(code, 0);
}

#[test]
fn failing_checks_exit_one_with_witness() {
    let s = Scratch::new("fail");
    let (code, out) = pqn(&s.0, &["identities", "--model", "n-minus", "--n", "2", "--suite", "two-form", "--two-form", "omega2"]);
    assert_eq!(code, 1);
    let r = json(&out);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["witness"].is_string()));

    let (code, out) = pqn(&s.0, &["flow", "--model", "n-minus", "--n", "3", "--t", "2", "--out", "traj.csv"]);
    assert_eq!(code, 1);
    let r = json(&out);
    assert_eq!(r["checks"][0]["name"], "integration");
    assert!(r["checks"][0]["witness"].as_str().unwrap().contains("step 1030"));
    assert!(std::fs::read_to_string(s.path("traj.csv")).unwrap().starts_with("t,x1,"));
}

#[test]
fn exit_codes() {
    let s = Scratch::new("codes");
    assert_eq!(pqn(&s.0, &["verify"]).0, 2);
    assert_eq!(pqn(&s.0, &["verify", "--model", "das-okubo", "--n", "1"]).0, 2);
    assert_eq!(pqn(&s.0, &["verify", "--model", "missing.json"]).0, 3);
    std::fs::write(s.path("bad.json"), "{\"chart\": 1}").unwrap();
    assert_eq!(pqn(&s.0, &["verify", "--model", "bad.json"]).0, 3);
    assert_eq!(pqn(&s.0, &["deform", "--model", "das-okubo", "--two-form", "nope"]).0, 2);
    assert_eq!(pqn(&s.0, &["identities", "--model", "das-okubo", "--suite", "recursion", "--kmax", "1"]).0, 2);
    assert_eq!(pqn(&s.0, &["flow", "--model", "das-okubo", "--dt", "0"]).0, 2);
    assert_eq!(pqn(&s.0, &["--help"]).0, 0);
}

#[test]
fn flow_from_csv_initial_state() {
    let s = Scratch::new("flow");
    std::fs::write(s.path("x0.csv"), "q1,q2,p1,p2\n0,0.5,-0.5,0.5\n").unwrap();
    let (code, out) = pqn(&s.0, &["flow", "--model", "n-plus", "--n", "2", "--x0", "x0.csv", "--t", "1", "--dt", "0.01", "--report", "f.json"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let r = json(&std::fs::read_to_string(s.path("f.json")).unwrap());
    assert_eq!(r["tables"]["steps"], 100);
    assert_eq!(r["tables"]["drift"].as_array().unwrap().len(), 2);
    assert_eq!(pqn(&s.0, &["flow", "--model", "n-plus", "--n", "3", "--x0", "x0.csv"]).0, 2);
}

#[test]
fn hierarchy_tables() {
    let s = Scratch::new("hier");
    let (code, out) = pqn(&s.0, &["hierarchy", "--model", "das-okubo", "--n", "2", "--kmax", "2"]);
    assert_eq!(code, 0);
    let r = json(&out);
    let chart = pqn_core::expr::Chart::phase_space(2);
    let h1 = chart.parse(r["tables"]["H"][0].as_str().unwrap()).unwrap();
    assert_eq!(h1, chart.parse("p1 + p2").unwrap());
    assert_eq!(r["tables"]["phi"][0], "0");
    assert_eq!(r["tables"]["Y"][0], "0");
}

#[test]
fn separable_model_runs() {
    let s = Scratch::new("sep");
    let (code, out) = pqn(&s.0, &["verify", "--model", "separable"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["tables"]["label"], "PN");
}
