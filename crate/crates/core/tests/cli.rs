use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn biquad(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biquad"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn biquad")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn pascal_gen_matches_binomials() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(dir.path(), &["gen", "pascal", "--m", "2", "--n", "2", "--out", "p.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_file(&dir.path().join("p.json"));
    assert_eq!(doc["m"], 2);
    assert_eq!(doc["n"], 2);
    // corner entries: 0!/(0!0!0!0!) and 4!/(1!1!1!1!)
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 16);
    assert_eq!(entries[0].as_f64().unwrap(), 1.0);
    assert_eq!(entries[15].as_f64().unwrap(), 24.0);
}

#[test]
fn pascal_psd_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&biquad(dir.path(), &["gen", "pascal", "--m", "3", "--n", "2", "--out", "p.json"])), 0);
    let out = biquad(dir.path(), &["check", "pd", "p.json"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["check"], "pd");
    assert_eq!(report["verdict"], true);
    assert!(report["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn diagonal_counterexample_is_psd_but_not_pd() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(dir.path(), &["gen", "diag-counterexample", "--m", "2", "--out", "d.json"]);
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("d.cp.json").exists());

    let psd = stdout_json(&biquad(dir.path(), &["check", "psd", "d.json"]));
    assert_eq!(psd["verdict"], true);
    let pd = stdout_json(&biquad(dir.path(), &["check", "pd", "d.json"]));
    assert_eq!(pd["verdict"], false);
    assert!(pd["value"].as_f64().unwrap().abs() <= 1e-8);
    let scop = stdout_json(&biquad(dir.path(), &["check", "strict-copositive", "d.json"]));
    assert_eq!(scop["verdict"], false);
    // the tensor is CP, so the necessary battery cannot refute it
    let cpb = stdout_json(&biquad(dir.path(), &["check", "necessary-cpb", "d.json"]));
    assert_eq!(cpb["verdict"], "inconclusive");
}

#[test]
fn cauchy_with_nonpositive_sum_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(dir.path(), &["gen", "cauchy", "--c", "1,-2", "--d", "1,1", "--out", "c.json"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let cop = stdout_json(&biquad(dir.path(), &["check", "copositive", "c.json"]));
    assert_eq!(cop["verdict"], false);
}

#[test]
fn cauchy_with_vanishing_denominator_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(dir.path(), &["gen", "cauchy", "--c", "1,-3", "--d", "1,1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing file
    assert_eq!(code(&biquad(dir.path(), &["check", "psd", "nope.json"])), 2);
    // malformed document
    std::fs::write(dir.path().join("bad.json"), "{\"m\":2,\"n\":2,\"entries\":[1,2]}").unwrap();
    assert_eq!(code(&biquad(dir.path(), &["check", "psd", "bad.json"])), 2);
    // unknown subcommand
    assert_eq!(code(&biquad(dir.path(), &["frobnicate"])), 2);
    // precondition
    assert_eq!(code(&biquad(dir.path(), &["gen", "pascal", "--m", "0", "--n", "2"])), 1);
    assert_eq!(code(&biquad(dir.path(), &["--tol=-1", "gen", "pascal", "--m", "1", "--n", "1"])), 1);
    assert_eq!(code(&biquad(dir.path(), &["verify", "T9.9"])), 1);
}

#[test]
fn pair_of_diagonal_counterexample_with_itself() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&biquad(dir.path(), &["gen", "diag-counterexample", "--m", "3", "--out", "d.json"])), 0);
    let out = biquad(dir.path(), &["pair", "d.json", "d.json"]);
    assert_eq!(code(&out), 0);
    let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    let doc = json_file(&dir.path().join("d.json"));
    let oracle: f64 = doc["entries"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap().powi(2)).sum();
    assert!((value - oracle).abs() <= 1e-12 * oracle);
}

#[test]
fn random_cpb_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "11", "gen", "random-cpb", "--m", "3", "--n", "2", "--r", "4"];
    let a = biquad(dir.path(), &args);
    let b = biquad(dir.path(), &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = biquad(dir.path(), &["--seed", "12", "gen", "random-cpb", "--m", "3", "--n", "2", "--r", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn pascal_exact_decomposition_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(dir.path(), &["decompose", "pascal-exact", "--m", "3", "--n", "3", "--out", "dec.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_file(&dir.path().join("dec.json"));
    assert_eq!(doc["method"], "pascal-exact");
    assert!(doc["residual"]["relative_error"].as_f64().unwrap() <= 1e-9);
    let dec = biquad::io::read_decomposition(&dir.path().join("dec.json")).unwrap();
    let pascal = biquad::generators::pascal(3, 3).unwrap();
    let err = biquad::decompose::Residual::between(&dec.reconstruct(), &pascal).unwrap();
    assert!(err.relative_error <= 1e-9);
}

#[test]
fn cauchy_quadrature_meets_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(
        dir.path(),
        &["--tol", "1e-8", "decompose", "cauchy-quad", "--c", "0.5,1,2", "--d", "1,3"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert!(doc["residual"]["max_abs_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn sos_flatten_refuses_indefinite_and_accepts_pascal() {
    let dir = tempfile::tempdir().unwrap();
    // I ⊗ diag(1, -1) has an indefinite flattening
    let out = biquad(dir.path(), &["gen", "outer", "--bmat", "1,0,0,1", "--cmat", "1,0,0,-1", "--out", "o.json"]);
    assert_eq!(code(&out), 0);
    let psd = stdout_json(&biquad(dir.path(), &["check", "psd", "o.json"]));
    assert_eq!(psd["verdict"], false);
    assert!(psd["witness"].is_object());
    assert_eq!(code(&biquad(dir.path(), &["decompose", "sos-flatten", "o.json"])), 1);

    assert_eq!(code(&biquad(dir.path(), &["gen", "pascal", "--m", "2", "--n", "3", "--out", "p.json"])), 0);
    let out = biquad(dir.path(), &["decompose", "sos-flatten", "p.json", "--out", "sos.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("sos.json")).unwrap();
    let sos = biquad::io::sos_from_json(&text).unwrap();
    let pascal = biquad::generators::pascal(2, 3).unwrap();
    let err = biquad::decompose::Residual::between(&sos.to_tensor().unwrap(), &pascal).unwrap();
    assert!(err.relative_error <= 1e-9);
}

#[test]
fn outer_then_extract_recovers_factors() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(
        dir.path(),
        &["gen", "outer", "--bmat", "2,1,1,3", "--cmat", "1,0.5,0.5,1", "--out", "o.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&biquad(dir.path(), &["decompose", "extract-factors", "o.json"]));
    assert_eq!(doc["extraction"]["decomposable"], true);

    // the diagonal counterexample is not an outer product
    assert_eq!(code(&biquad(dir.path(), &["gen", "diag-counterexample", "--m", "2", "--out", "d.json"])), 0);
    let out = biquad(dir.path(), &["decompose", "extract-factors", "d.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["extraction"]["decomposable"], false);
}

#[test]
fn lift_builds_outer_cp_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(
        dir.path(),
        &["decompose", "lift", "--b-factors", "1,0;1,1", "--c-factors", "0,2;1,1"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["decomposition"]["pairs"].as_array().unwrap().len(), 4);
    assert!(doc["residual"]["max_abs_error"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn verify_single_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = biquad(dir.path(), &["verify", "t4.2", "--count", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["theorem_id"], "T4.2");
    assert_eq!(report["cases_run"], report["cases_passed"]);
}
