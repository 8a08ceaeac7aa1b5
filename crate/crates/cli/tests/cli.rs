use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qsymbol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsymbol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn constant_phi(n: usize, re: f64) -> String {
    let row = vec![format!("[{re},0]"); n].join(",");
    format!("[{}]", vec![format!("[{row}]"); n].join(","))
}

#[test]
fn cocommutative_antidiagonal_check_agrees() {
    let out = qsymbol(&["check", "--theorem", "4.3", "--group", "S3", "--symbol", "antidiagonal-random", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["theorem"], "4.3");
    assert_eq!(report["agree"], true);
    assert_eq!(report["direct"], true);
    assert_eq!(report["symbolic"], true);
    assert_eq!(report["closed_form"], true);
    assert_eq!(report["seed"], 7);
}

#[test]
fn commutative_check_on_invariant_phi_file() {
    let dir = tempfile::tempdir().unwrap();
    // φ(s,t) = u(s - t) on Z6
    let u = [1.0, 2.0, -0.5, 0.0, 3.0, 1.5];
    let rows: Vec<String> = (0..6)
        .map(|s| {
            let row: Vec<String> = (0..6).map(|t| format!("[{},0]", u[(s + 6 - t) % 6])).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    let phi = write(dir.path(), "phi.json", &format!("[{}]", rows.join(",")));
    let source = format!("file:{phi}");
    let out = qsymbol(&["check", "--theorem", "5.6", "--group", "Z6", "--symbol", &source]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    for key in ["direct", "symbolic", "closed_form", "flip_identity", "agree"] {
        assert_eq!(report[key], true, "{key}");
    }
}

#[test]
fn non_associative_table_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    // the smallest non-associative loop: a Latin square with identity and inverses
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"order":5,"cayley":[[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]}"#,
    );
    let out = qsymbol(&["check", "--group", &bad]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid Cayley table"));

    let out = qsymbol(&["group", "validate", &bad]);
    assert_eq!(code(&out), 2);
    let report = json(&out);
    assert_eq!(report["passed"], false);
    assert!(report["violation"].get("NonAssociative").is_some(), "{report}");
}

#[test]
fn non_invariant_symbol_is_rejected_by_every_side() {
    // a non-invariant symbol: every side says false, so the sides still agree
    let out = qsymbol(&["check", "--theorem", "5.6", "--group", "Z3", "--symbol", "random", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["direct"], false);
    assert_eq!(report["agree"], true);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["check", "--theorem", "4.3", "--group", "D4", "--symbol", "random", "--seed", "42"];
    let a = qsymbol(&args);
    let b = qsymbol(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let other = qsymbol(&["check", "--theorem", "4.3", "--group", "D4", "--symbol", "random", "--seed", "43"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn output_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qsymbol(&["check", "--group", "Z3", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report["theorem"], "5.6");
    assert_eq!(report["seed"], 0);
}

#[test]
fn conflicting_realization_and_theorem_is_rejected() {
    let out = qsymbol(&["check", "--theorem", "4.3", "--realization", "commutative"]);
    assert_eq!(code(&out), 1);
    let out = qsymbol(&["check", "--theorem", "9.9"]);
    assert_eq!(code(&out), 1);
    let out = qsymbol(&["check", "--group", "Q7"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn schur_norm_of_ones_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let ones = write(dir.path(), "ones.json", &constant_phi(4, 1.0));
    let out = qsymbol(&["norm", "--schur", "--group", "Z4", "--phi", &ones]);
    assert_eq!(code(&out), 0);
    let result = json(&out);
    let value = result["value"].as_f64().unwrap();
    assert!((value - 1.0).abs() <= 1e-3, "{value}");
    assert_eq!(result["converged"], true);
    assert_eq!(result["certificate_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn schur_norm_rejects_bad_input() {
    let out = qsymbol(&["norm", "--schur", "--tol", "0"]);
    assert_eq!(code(&out), 1);

    let dir = tempfile::tempdir().unwrap();
    let phi = write(dir.path(), "phi.json", &constant_phi(3, 1.0));
    let out = qsymbol(&["norm", "--schur", "--group", "Z4", "--phi", &phi]);
    assert_eq!(code(&out), 1);

    let out = qsymbol(&["norm", "--schur", "--haagerup"]);
    assert_ne!(code(&out), 0);
}

#[test]
fn haagerup_norm_of_a_symbol_file_matches_the_factorization_bound() {
    let dir = tempfile::tempdir().unwrap();
    // a = diag(2, 1), b = [[0, 1], [3, 0]]: ‖a‖·‖b‖ = 2·3
    let chi = write(
        dir.path(),
        "chi.json",
        r#"{"terms":[{"a":{"diagonal":[[2,0],[1,0]]},"b":[[[0,0],[1,0]],[[3,0],[0,0]]]}]}"#,
    );
    let source = format!("file:{chi}");
    let out = qsymbol(&["norm", "--haagerup", "--symbol", &source]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let result = json(&out);
    assert!((result["value"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert!(result["canonical"]["value"].as_f64().unwrap() <= 6.0 + 1e-10);
    assert_eq!(result["terms"], 1);
}

#[test]
fn describe_commutative_z2() {
    let out = qsymbol(&["describe", "--realization", "commutative", "--group", "Z2"]);
    assert_eq!(code(&out), 0);
    let d = json(&out);
    let w = d["w"].as_array().unwrap();
    assert_eq!(w.len(), 4);
    // W δ_{s,t} = δ_{s,st}
    assert_eq!(w[3], serde_json::json!([[1, 1], [1, 0]]));
}

#[test]
fn describe_identity_symbol() {
    let out = qsymbol(&["describe", "--symbol", "identity"]);
    assert_eq!(code(&out), 0);
    let d = json(&out);
    assert_eq!(d["terms"], 1);
    for row in d["schur_function"].as_array().unwrap() {
        for entry in row.as_array().unwrap() {
            assert_eq!(entry[0].as_f64(), Some(1.0));
            assert_eq!(entry[1].as_f64(), Some(0.0));
        }
    }
}

#[test]
fn describe_cocommutative_s3() {
    let out = qsymbol(&["describe", "--realization", "cocommutative", "--group", "S3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["reduced_space_dim"], 6);

    let out = qsymbol(&["describe", "--realization", "cocommutative", "--group", "S3", "--symbol", "antidiagonal-random"]);
    let d = json(&out);
    let support = d["support"]["pairs"].as_array().unwrap();
    assert!(!support.is_empty() && support.len() <= 6);
}

#[test]
fn group_emit_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d4.json");
    let out = qsymbol(&["group", "emit", "D4", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = qsymbol(&["group", "validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["passed"], true);
    let out = qsymbol(&["check", "--group", path.to_str().unwrap(), "--theorem", "4.3"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn dense_budget_env_var_is_a_guardrail() {
    let out = Command::new(env!("CARGO_BIN_EXE_qsymbol"))
        .args(["check", "--theorem", "4.3", "--group", "S3"])
        .env("QSYMBOL_MAX_DENSE", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn tolerance_below_rounding_forces_a_disagreement() {
    let out = qsymbol(&[
        "check", "--theorem", "4.3", "--group", "S3", "--symbol", "antidiagonal-random", "--seed", "7", "--tol", "1e-300",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["agree"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("disagreement"));
}
