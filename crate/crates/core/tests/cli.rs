use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_cftlab")).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), v)
}

fn raw(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cftlab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn classgroup_default() {
    let (code, v) = run(&["compute", "classgroup"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["invariant_factors"], serde_json::json!([4, 4]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["modulus"], "[(x):1, (x-1):1]");
}

#[test]
fn classgroup_trivial() {
    let (code, v) = run(&["compute", "classgroup", "--n", "1", "--modulus", "[]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["invariant_factors"], serde_json::json!([]));
    assert_eq!(v["result"]["order"], 1);
}

#[test]
fn pair_tau_desk_example() {
    let (code, v) = run(&["compute", "pair-tau", "--f", "2", "--divisor", "[(x-2):1]"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["pairing"]["dlog"], 1);
    assert_eq!(v["result"]["pairing"]["mu_generator"], "GF(5):[2]");
}

#[test]
fn selmer_and_pairings() {
    let (_, v) = run(&["compute", "selmer"]);
    assert_eq!(v["result"]["order"], 16);
    let (code, v) = run(&["compute", "pair-tate", "--n", "3"]);
    assert_eq!(code, 0);
    assert!(v["result"]["pairing"]["dlog"].as_u64().unwrap() < 3);
    let (code, v) = run(&["compute", "pair-ate"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["tate_agrees"], true);
    assert_eq!(v["checks"][0]["verifies"], "lem:ext");
}

#[test]
fn kummer_kernel_records_degree() {
    let (code, v) = run(&["verify", "--suite", "kummer-kernel"]);
    assert_eq!(code, 0);
    let kernel = &v["checks"][0];
    assert_eq!(kernel["verifies"], "thm:kummer2");
    assert_eq!(kernel["detail"]["extension_degree"], 16);
}

#[test]
fn weil_500() {
    let (code, v) = run(&["verify", "--suite", "weil", "--samples", "500"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"][0]["detail"]["samples"], 500);
    assert_eq!(v["checks"][0]["verifies"], "thm:weilrec");
}

#[test]
fn zero_samples_vacuous() {
    let (code, v) = run(&["verify", "--samples", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!(v["vacuous"], true);
    assert_eq!(v["command"], "verify all");
}

#[test]
fn deterministic() {
    let a = raw(&["verify", "--suite", "adjoint", "--samples", "20", "--seed", "7"]);
    let b = raw(&["verify", "--suite", "adjoint", "--samples", "20", "--seed", "7"]);
    assert_eq!(a, b);
}

#[test]
fn usage_and_validation_errors() {
    let (code, v) = run(&["verify", "--suite", "bogus"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, v) = run(&["compute", "classgroup", "--n", "3"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "validation");
    let (code, v) = run(&["compute", "classgroup", "--modulus", "[(x):1"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");
    let (code, v) = run(&["compute", "pair-tau"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn config_file_and_overrides() {
    let dir = std::env::temp_dir().join(format!("cftlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.json");
    std::fs::write(&cfg, r#"{"field": "GF(9)", "n": 2, "modulus": "[(x):1]", "suite": "reciprocity", "samples": 10}"#)
        .unwrap();
    let c = cfg.to_str().unwrap();
    let (code, v) = run(&["verify", "--config", c]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "verify reciprocity");
    assert_eq!(v["config"]["field"], "GF(9)");
    let (_, v) = run(&["verify", "--config", c, "--n", "4", "--field", "GF(5)"]);
    assert_eq!((v["config"]["n"].as_u64(), v["config"]["field"].as_str()), (Some(4), Some("GF(5)")));
    let out = dir.join("r.txt");
    let (code, text) = raw(&["verify", "--config", c, "--format", "text", "--out", out.to_str().unwrap()]);
    assert_eq!((code, text.as_str()), (0, ""));
    let written = std::fs::read_to_string(&out).unwrap();
    assert!(written.contains("[PASS] thm:artinkernel modulus"), "{written}");
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    let (code, v) = run(&["verify", "--config", c]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "config");
    std::fs::remove_dir_all(&dir).unwrap();
}
