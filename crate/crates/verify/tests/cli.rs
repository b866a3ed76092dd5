use std::process::{Command, Output};

use serde_json::Value;

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(args)
        .env("VERIFY_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn list_has_a_full_catalogue() {
    let o = verify(&["list"]);
    assert!(o.status.success());
    let lines = stdout(&o).lines().filter(|l| !l.trim().is_empty()).count();
    assert!(lines >= 18, "{lines} entries");
    for id in ["sigma.structure", "monge.equivalence", "monge.weyl-flat", "pair.growth"] {
        assert!(stdout(&o).contains(id), "{id}");
    }
}

#[test]
fn explain_known_and_unknown() {
    let o = verify(&["explain", "pair.growth"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(2,3,5)"));
    let o = verify(&["explain", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
}

#[test]
fn single_identity_passes() {
    let o = verify(&["run", "--check", "sigma.structure", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["schema"], "g2monge-verify/1");
    assert_eq!(r["checks"][0]["verdict"], "pass");
}

#[test]
fn degenerate_alpha_is_a_domain_skip() {
    let o = verify(&["run", "--check", "monge.equivalence", "--alpha", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["checks"][0]["verdict"], "domain-skip");
    assert!(r["checks"][0]["detail"].as_str().unwrap().contains("alpha^2 - 1"));
}

#[test]
fn flatness_verdicts_for_requested_alphas() {
    let o = verify(&[
        "run", "--check", "monge.weyl-flat", "--alpha", "3", "--alpha", "1/3", "--alpha", "2",
        "--points", "6", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = json(&o);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    let flat: Vec<bool> = checks.iter().map(|c| c["payload"]["flat"].as_bool().unwrap()).collect();
    assert_eq!(flat, [true, true, false]);
}

#[test]
fn generic_two_copy_coframe_fails_with_exit_one() {
    let o = verify(&["run", "--check", "pair.coframe-generic", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["checks"][0]["verdict"], "fail");
    assert!(r["checks"][0]["payload"]["required_lambda"].is_string());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(verify(&["run", "--check", "no.such.check"]).status.code(), Some(2));
    assert_eq!(verify(&["run", "--alpha", "x/2"]).status.code(), Some(2));
    assert_eq!(verify(&["run", "--beta", "3"]).status.code(), Some(2));
    assert_eq!(verify(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let args = ["run", "--check", "rolling.weyl", "--points", "5", "--format", "json", "--seed", "9"];
    let (a, b) = (verify(&args), verify(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 9);
}

#[test]
fn models_listing_and_dump() {
    let o = verify(&["models", "list"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("monge-f"));
    let o = verify(&["models", "dump", "monge-f"]);
    assert!(stdout(&o).contains("alpha"));
    assert_eq!(verify(&["models", "dump", "nope"]).status.code(), Some(2));
}
