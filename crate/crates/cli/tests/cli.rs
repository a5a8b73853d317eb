use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use brauer_casimir::casimir::{build_casimir, one_element, CasimirSpec, Projector};
use brauer_casimir::liealg::{uea_to_json, Enveloping, Uea};
use brauer_casimir::ring::MPoly;
use brauer_casimir::tensor::ActionConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_brauer-casimir"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn build_o3_k1() {
    let o = run(&["build", "--family", "o", "--N", "3", "--projector", "sym", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["family"], "o");
    assert_eq!(v["N"], 3);
    assert!(!v["terms"].as_array().unwrap().is_empty());
}

#[test]
fn odd_symplectic_dimension_is_usage_error() {
    let o = run(&["build", "--family", "sp", "--N", "5", "--projector", "sym", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flag_errors_are_usage_errors() {
    assert_eq!(run(&["build", "--family", "o", "--N", "3", "--projector", "sym"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--family", "x", "--N", "3", "--projector", "sym", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nothing"]).status.code(), Some(2));
    let o = run(&["build", "--family", "o", "--N", "3", "--projector", "sym", "--m", "2", "--shifts", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pole_without_omega_limit() {
    let o = run(&["build", "--family", "sp", "--N", "4", "--projector", "sym", "--m", "4", "--no-omega-limit"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole"));
    let o = run(&["build", "--family", "sp", "--N", "4", "--projector", "sym", "--m", "4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn explicit_shifts() {
    let o = run(&[
        "build", "--family", "o", "--N", "3", "--projector", "asym", "--m", "2", "--shifts", "-1/2,3", "--format", "text",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("F[1,1]"));
}

#[test]
fn hc_of_built_element() {
    let path = scratch("o3-k1.json");
    let o = run(&[
        "build", "--family", "o", "--N", "3", "--projector", "sym", "--k", "1", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["hc", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(5/3)*l1^2 - 5/12"), "{out}");
    assert!(out.contains("(5/3)*x1^2 + (5/3)*x1"), "{out}");
}

#[test]
fn hc_round_trip_matches_library() {
    let cfg = ActionConfig::symplectic(4);
    let built = run(&["build", "--family", "sp", "--N", "4", "--projector", "asym", "--k", "1"]);
    assert_eq!(built.status.code(), Some(0));
    let o = run_stdin(&["hc"], &stdout(&built));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();

    let env = Enveloping::for_config(cfg).unwrap();
    let z = build_casimir(&CasimirSpec::theorem(cfg, Projector::Asym, 1), &env).unwrap();
    let chi = env.hc_image(&z).unwrap();
    let expected = serde_json::to_value(brauer_casimir::ring::MPolyJson::from(&chi)).unwrap();
    assert_eq!(v["chi"], expected);
}

#[test]
fn hc_of_identity_is_one() {
    let env = Enveloping::for_config(ActionConfig::orthogonal(4)).unwrap();
    let input = serde_json::to_string(&uea_to_json(env.basis(), &one_element())).unwrap();
    let o = run_stdin(&["hc", "--format", "text"], &input);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "shifted: 1\nlambda: 1\n");
}

#[test]
fn hc_rejects_non_central_input() {
    let env = Enveloping::for_config(ActionConfig::orthogonal(3)).unwrap();
    let idx = env.basis().index_of(1, 1).unwrap();
    let f11: Uea<MPoly> = Uea::generator(idx);
    let input = serde_json::to_string(&uea_to_json(env.basis(), &f11)).unwrap();
    let o = run_stdin(&["hc"], &input);
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("not central") && err.contains("F["), "{err}");
}

#[test]
fn hc_rejects_malformed_json() {
    assert_eq!(run_stdin(&["hc"], "{").status.code(), Some(2));
}

#[test]
fn verify_theorems_small_ranks() {
    let o = run(&["verify", "--suite", "theorems", "--max-N", "5", "--max-k", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("criterion 6 theorems: PASS"));
}

#[test]
fn verify_brauer() {
    let o = run(&["verify", "--suite", "brauer", "--m", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_pole_region_instance() {
    let o = run(&["verify", "--suite", "theorems", "--family", "sp", "--N", "4", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS sp4 symp-sym-theorem k=2 [omega-limit]"));
}

#[test]
fn verify_failure_exit_code() {
    let o = run(&[
        "verify", "--suite", "theorems", "--family", "sp", "--N", "4", "--k", "2", "--projector", "sym", "--mode",
        "fixed-dimension",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL sp4 symp-sym-theorem k=2"));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "corollaries", "--family", "o", "--N", "4", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let build = ["build", "--family", "o", "--N", "5", "--projector", "sym", "--m", "3"];
    assert_eq!(run(&build).stdout, run(&build).stdout);
}
