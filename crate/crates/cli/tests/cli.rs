use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nonfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonfree")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out.stdout))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

const W_STATE: &str = r#"{"dims": [2, 2, 2], "entries": [
    {"i": 1, "j": 1, "k": 2, "re": 1}, {"i": 1, "j": 2, "k": 1, "re": 1}, {"i": 2, "j": 1, "k": 1, "re": 1}]}"#;

#[test]
fn certify_t2() {
    let out = nonfree(&["certify-nonfree", "--named", "T2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], true);
    assert_eq!(r["command"], "certify-nonfree");
    let lambda = r["result"]["ness"]["lambda"].as_f64().unwrap();
    assert!((lambda - 43.0 / 42.0).abs() < 1e-10);
}

#[test]
fn certify_family_member() {
    let out = nonfree(&["certify-nonfree", "--family", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["obstruction"]["kind"], "ww-star-offdiagonal");
}

#[test]
fn family_verify() {
    let out = nonfree(&["family", "--n", "3", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["verification"]["ok"], true);
    assert_eq!(r["result"]["data"]["lambda_w"], serde_json::json!({"num": "5", "den": "14"}));
}

#[test]
fn free_support_of_w_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "w.json", W_STATE);
    let out = nonfree(&["free-support", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["free"], true);
    assert_eq!(r["result"]["size"], 3);
}

#[test]
fn non_free_bare_support() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.json", "[[1,1,1],[1,1,2]]");
    let out = nonfree(&["free-support", "--input", &input, "--dims", "2", "2", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["free"], false);
}

#[test]
fn moment_map_of_w_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "w.json", W_STATE);
    let out = nonfree(&["moment-map", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let spectra = r["result"]["spectra"][0].as_array().unwrap();
    assert!((spectra[0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn flow_converges_on_w_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "w.json", W_STATE);
    let out = nonfree(&["flow", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["converged"], true);
}

#[test]
fn malformed_input_exits_2_with_error_object() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.json", "{\"dims\": [2, 2");
    let out = nonfree(&["moment-map", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "malformed-json");

    let input = write(dir.path(), "oob.json", r#"{"dims": [2, 2, 2], "entries": [{"i": 3, "j": 1, "k": 1, "re": 1}]}"#);
    let out = nonfree(&["moment-map", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "malformed-tensor");

    let out = nonfree(&["moment-map", "--input", "/nonexistent/t.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = nonfree(&["family"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "usage");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "w.json", W_STATE);
    let point = write(dir.path(), "p.json", "[[0.5,0.5],[0.5,0.5],[0.5,0.5]]");
    for args in [
        vec!["certify-nonfree", "--named", "T5"],
        vec!["polytope", "--input", &input, "--refute", &point, "--seed", "7"],
    ] {
        let a = nonfree(&args);
        let b = nonfree(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn polytope_commands() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", W_STATE);
    // every triple below the W-state support has at most one index equal to 2
    let hs = write(dir.path(), "h.json", r#"{"h": [[1, 0], [1, 0], [1, 0]], "c": 2}"#);
    let out = nonfree(&["polytope", "--input", &w, "--halfspace", &hs]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["valid"], true);

    let uniform = write(dir.path(), "p.json", "[[0.5,0.5],[0.5,0.5],[0.5,0.5]]");
    let out = nonfree(&["polytope", "--input", &w, "--refute", &uniform]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["refuted"], true);

    let out = nonfree(&["polytope", "--input", &w, "--inner"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!report(&out)["result"]["inner_points"].as_array().unwrap().is_empty());
}

#[test]
fn reduce_family_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let fam = report(&nonfree(&["family", "--n", "4"]));
    let tensor = serde_json::to_string(&fam["result"]["family_tensor"]["tensor"]).unwrap();
    let input = write(dir.path(), "tw.json", &tensor);
    let out = nonfree(&["reduce-s0", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["reduced"], true);
    assert!(r["result"]["residual"].as_f64().unwrap() <= 1e-8);

    let ghz = write(dir.path(), "ghz.json", r#"{"dims": [2, 2, 2], "entries": [{"i": 1, "j": 1, "k": 1, "re": 1}, {"i": 2, "j": 2, "k": 2, "re": 1}]}"#);
    let out = nonfree(&["reduce-s0", "--input", &ghz]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["reduced"], false);
}
