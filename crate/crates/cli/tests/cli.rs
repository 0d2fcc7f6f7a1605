use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn pmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmod")).args(args).env_remove("PF_SEED").output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = pmod(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn diagnostic(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_vertices() {
    let v = run_ok(&["validate", path(&fixture("g.json"))]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["n"], 2);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let out = pmod(&["validate", path(&bad)]);
    assert_eq!(code(&out), 2);
    assert_eq!(diagnostic(&out)["error"], "malformed-input");

    // shapes disagree with the dims
    let short = r#"{"p":7,"n":1,"axes":[["0/1","1/1"]],"dims":[1,1],"steps":[[[],[]]]}"#;
    std::fs::write(&bad, short).unwrap();
    assert_eq!(code(&pmod(&["validate", path(&bad)])), 2);

    let out = pmod(&["tack", path(&fixture("hook.json")), path(&fixture("hook2.json")), "--delta", "one"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn non_functor_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let nf = dir.path().join("nf.json");
    let square = r#"{"p":7,"n":2,"axes":[["0/1","1/1"],["0/1","1/1"]],"dims":[1,1,1,1],
        "steps":[[[1],[2],[],[]],[[1],[],[1],[]]]}"#;
    std::fs::write(&nf, square).unwrap();
    let out = pmod(&["validate", path(&nf)]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);
    // other commands refuse it as input
    assert_eq!(code(&pmod(&["decompose", path(&nf)])), 2);
}

#[test]
fn preconditions_exit_3() {
    let out = pmod(&["tack", path(&fixture("sum.json")), path(&fixture("hook.json")), "--delta", "1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(diagnostic(&out)["error"], "precondition");
    assert_eq!(code(&pmod(&["approx-indec", path(&fixture("hook.json")), "--eps", "0"])), 3);
    assert_eq!(code(&pmod(&["instability", path(&fixture("hook.json")), "--delta", "1/10"])), 3);
}

#[test]
fn decompose_splits_the_sum() {
    let dir = tempfile::tempdir().unwrap();
    let proof = dir.path().join("iso.json");
    let v = run_ok(&["decompose", path(&fixture("sum.json")), "--emit-proof", path(&proof)]);
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);
    let p: Value = serde_json::from_str(&std::fs::read_to_string(&proof).unwrap()).unwrap();
    assert!(p["iso"]["mats"].is_array());
    let g = run_ok(&["decompose", path(&fixture("g.json"))]);
    assert_eq!(g["summands"].as_array().unwrap().len(), 1);
}

#[test]
fn tack_proof_certifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let proof = dir.path().join("proof.json");
    let (a, b) = (fixture("hook.json"), fixture("hook2.json"));
    let args = ["tack", path(&a), path(&b), "--delta", "1", "--out", path(&out), "--emit-proof", path(&proof)];
    let o = pmod(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = run_ok(&["certify", path(&proof), "--target", path(&out)]);
    assert_eq!(v["verified"], true);
    assert_eq!(v["stages"], 7);

    // the certificate is from A ⊕ B, not from A
    assert_eq!(code(&pmod(&["certify", path(&proof), "--source", path(&a)])), 1);

    let mut p: Value = serde_json::from_str(&std::fs::read_to_string(&proof).unwrap()).unwrap();
    let mats = p["certificate"]["f"]["mats"].as_array_mut().unwrap();
    let entry = mats.iter_mut().find_map(|m| m.as_array_mut().filter(|m| !m.is_empty())).unwrap();
    entry[0] = Value::from((entry[0].as_u64().unwrap() + 1) % 65521);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, p.to_string()).unwrap();
    let o = pmod(&["certify", path(&bad)]);
    assert_eq!(code(&o), 1);
    assert_eq!(diagnostic(&o)["error"], "verification");
}

#[test]
fn approximation_of_zero_is_the_cube() {
    let dir = tempfile::tempdir().unwrap();
    let proof = dir.path().join("proof.json");
    let m = run_ok(&["approx-indec", path(&fixture("zero.json")), "--eps", "1/2", "--emit-proof", path(&proof)]);
    assert_eq!(m["dims"].as_array().unwrap().iter().filter(|d| d.as_u64() == Some(1)).count(), 1);
    let v = run_ok(&["certify", path(&proof), "--source", path(&fixture("zero.json"))]);
    assert_eq!(v["eps"], "1/4");
}

#[test]
fn matching_and_eps_indecomposability() {
    let v = run_ok(&["match", path(&fixture("sum.json")), path(&fixture("sum.json")), "--eps", "0"]);
    assert_eq!(v["matched"], true);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 2);
    let v = run_ok(&["eps-indec", path(&fixture("sum.json")), "--eps", "1/2"]);
    assert_eq!(v["eps_indecomposable"], false);
    assert_eq!(v["nontrivial_summands"], 2);
    let v = run_ok(&["eps-indec", path(&fixture("g.json")), "--eps", "1/2"]);
    assert_eq!(v["eps_indecomposable"], true);
}

#[test]
fn instability_on_far_hooks() {
    let v = run_ok(&["instability", path(&fixture("far.json")), "--delta", "1/10"]);
    assert_eq!(v["bottleneck_lower"], "1/1");
    assert_eq!(v["candidates"].as_array().unwrap().len(), 3);
}

#[test]
fn random_is_seeded_by_flag_or_environment() {
    let by_flag = pmod(&["random", "--seed", "42"]).stdout;
    let by_env = Command::new(env!("CARGO_BIN_EXE_pmod")).arg("random").env("PF_SEED", "42").output().unwrap().stdout;
    assert_eq!(by_flag, by_env);
    assert_ne!(by_flag, pmod(&["random", "--seed", "43"]).stdout);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = pmod(&["random", "--prime", "3", "--params", "3", "--size", "2", "--out", path(&out)]);
    assert!(o.status.success());
    let v = run_ok(&["validate", path(&out)]);
    assert_eq!(v["n"], 3);
}

#[test]
fn gadget_matches_the_fixture() {
    let out = pmod(&["gadget"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(fixture("g.json")).unwrap());
}
