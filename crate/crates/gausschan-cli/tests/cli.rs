//! End-to-end tests of the binary: file formats, verdicts, exit codes and
//! report determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gausschan")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("GAUSSCHAN_TOL")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gausschan-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const ATTENUATION: &str = r#"{"schema_version":"1","n":1,"label":"attenuation","x":[[0.5,0.0],[0.0,0.5]],"y":[[0.75,0.0],[0.0,0.75]]}"#;
const IDENTITY: &str = r#"{"schema_version":"1","n":1,"label":"identity","x":[[1.0,0.0],[0.0,1.0]],"y":[[0.0,0.0],[0.0,0.0]]}"#;
const NEGATIVE_NOISE: &str = r#"{"schema_version":"1","n":1,"x":[[1.0,0.0],[0.0,1.0]],"y":[[-0.1,0.0],[0.0,-0.1]]}"#;
const MIRROR: &str = r#"{"schema_version":"1","n":1,"label":"mirror","x":[[1.0,0.0],[0.0,-1.0]],"y":[[2.0,0.0],[0.0,2.0]]}"#;
const NEGATIVE_DIAG: &str = r#"{"schema_version":"1","n":1,"label":"neg-diag","x":[[-1.0,0.0],[0.0,-2.0]],"y":[[4.0,0.0],[0.0,4.0]]}"#;
const ATT_GENERATOR: &str = r#"{"schema_version":"1","n":1,"label":"attenuation generator","a":[[0.0,1.0],[-1.0,0.0]],"b":[[1.0,0.0],[0.0,1.0]],"h":[[0.0,0.0],[0.0,0.0]]}"#;
const SQUEEZE_GENERATOR: &str = r#"{"schema_version":"1","n":1,"label":"squeezing generator","a":[[0.0,0.0],[0.0,0.0]],"b":[[1.0,0.5],[0.5,1.0]],"h":[[0.0,1.0],[1.0,0.0]]}"#;

#[test]
fn check_exit_codes() {
    let dir = tempdir("check");
    write(&dir, "att.json", ATTENUATION);
    write(&dir, "bad.json", NEGATIVE_NOISE);
    write(&dir, "garbage.json", "{ not json");

    assert_eq!(run_in(&dir, &["check", "att.json"]).status.code(), Some(0));
    assert_eq!(run_in(&dir, &["check", "bad.json"]).status.code(), Some(1));
    assert_eq!(run_in(&dir, &["check", "garbage.json"]).status.code(), Some(2));
    assert_eq!(run_in(&dir, &["check", "missing.json"]).status.code(), Some(2));
}

#[test]
fn json_reports_are_deterministic() {
    let dir = tempdir("determinism");
    write(&dir, "att.json", ATTENUATION);
    let a = run_in(&dir, &["classify", "att.json", "--json"]);
    let b = run_in(&dir, &["classify", "att.json", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "byte-identical machine reports");
}

#[test]
fn compose_with_identity_round_trips_bit_exactly() {
    let dir = tempdir("compose");
    // Awkward decimals survive the write/read cycle exactly.
    let awkward = r#"{"schema_version":"1","n":1,"label":"awkward","x":[[0.1234567890123456,0.0],[0.0,0.1234567890123456]],"y":[[1.0000000000000002,0.3333333333333333],[0.3333333333333333,1.9999999999999998]]}"#;
    write(&dir, "c.json", awkward);
    write(&dir, "id.json", IDENTITY);
    let out = run_in(&dir, &["compose", "c.json", "id.json", "--out", "out.json"]);
    assert_eq!(out.status.code(), Some(0));

    let original: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("c.json")).unwrap()).unwrap();
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out.json")).unwrap()).unwrap();
    assert_eq!(original["x"], written["x"]);
    assert_eq!(original["y"], written["y"]);
}

#[test]
fn compose_rejects_mode_mismatch() {
    let dir = tempdir("mismatch");
    write(&dir, "one.json", ATTENUATION);
    let two = r#"{"schema_version":"1","n":2,"x":[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0],[0.0,0.0,1.0,0.0],[0.0,0.0,0.0,1.0]],"y":[[0.0,0.0,0.0,0.0],[0.0,0.0,0.0,0.0],[0.0,0.0,0.0,0.0],[0.0,0.0,0.0,0.0]]}"#;
    write(&dir, "two.json", two);
    let out = run_in(&dir, &["compose", "one.json", "two.json", "--out", "x.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classify_mirror_flags_determinant() {
    let dir = tempdir("mirror");
    write(&dir, "mirror.json", MIRROR);
    let out = run_in(&dir, &["classify", "mirror.json", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let infdiv = checks.iter().find(|c| c["name"] == "infdiv_necessary").unwrap();
    assert_eq!(infdiv["verdict"], "false");
    assert!(infdiv["note"].as_str().unwrap().contains("not infinitesimal divisible"));
}

#[test]
fn classify_rejects_non_cp_input() {
    let dir = tempdir("classify-bad");
    write(&dir, "bad.json", NEGATIVE_NOISE);
    assert_eq!(run_in(&dir, &["classify", "bad.json"]).status.code(), Some(1));
}

#[test]
fn divide_produces_valid_factors() {
    let dir = tempdir("divide");
    write(&dir, "att.json", ATTENUATION);
    let out = run_in(
        &dir,
        &["divide", "att.json", "--out-left", "L.json", "--out-right", "R.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(run_in(&dir, &["check", "L.json"]).status.code(), Some(0));
    assert_eq!(run_in(&dir, &["check", "R.json"]).status.code(), Some(0));

    // Composing the factors reproduces the channel.
    let comp = run_in(&dir, &["compose", "L.json", "R.json", "--out", "back.json"]);
    assert_eq!(comp.status.code(), Some(0));
    let back: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("back.json")).unwrap()).unwrap();
    let x = back["x"].as_array().unwrap();
    let first = x[0].as_array().unwrap()[0].as_f64().unwrap();
    assert!((first - 0.5).abs() < 1e-8);
}

#[test]
fn divide_rejects_reversible_input() {
    let dir = tempdir("divide-rev");
    write(&dir, "id.json", IDENTITY);
    let out = run_in(
        &dir,
        &["divide", "id.json", "--out-left", "L.json", "--out-right", "R.json"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn semigroup_writes_closed_form_attenuation() {
    let dir = tempdir("semigroup");
    write(&dir, "gen.json", ATT_GENERATOR);
    let out = run_in(&dir, &["semigroup", "gen.json", "--t", "1", "--out-dir", "ev"]);
    assert_eq!(out.status.code(), Some(0));
    let evolved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("ev/evolve_t1.json")).unwrap())
            .unwrap();
    let x00 = evolved["x"][0][0].as_f64().unwrap();
    let y00 = evolved["y"][0][0].as_f64().unwrap();
    assert!((x00 - (-1.0f64).exp()).abs() < 1e-9);
    assert!((y00 - (1.0 - (-2.0f64).exp())).abs() < 1e-9);
}

#[test]
fn semigroup_reports_simple_form_obstruction() {
    let dir = tempdir("squeeze");
    write(&dir, "gen.json", SQUEEZE_GENERATOR);
    let out = run_in(&dir, &["semigroup", "gen.json", "--t", "0.5", "--out-dir", "ev", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let sf = checks.iter().find(|c| c["name"] == "simple_form").unwrap();
    assert_eq!(sf["verdict"], "no");
    let bn = checks.iter().find(|c| c["name"] == "bounded_noise").unwrap();
    assert_eq!(bn["verdict"], "indeterminate");
}

#[test]
fn semigroup_rejects_invalid_generator() {
    let dir = tempdir("badgen");
    // a = sigma, b = 0 violates i A + B >= 0.
    let bad = r#"{"schema_version":"1","n":1,"a":[[0.0,1.0],[-1.0,0.0]],"b":[[0.0,0.0],[0.0,0.0]],"h":[[0.0,0.0],[0.0,0.0]]}"#;
    write(&dir, "gen.json", bad);
    let out = run_in(&dir, &["semigroup", "gen.json", "--t", "1", "--out-dir", "ev"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn embed_check_negative_diagonal_is_no_with_jordan_report() {
    let dir = tempdir("embed-no");
    write(&dir, "neg.json", NEGATIVE_DIAG);
    let out = run_in(&dir, &["embed-check", "neg.json", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let e = checks.iter().find(|c| c["name"] == "embeddable_x").unwrap();
    assert_eq!(e["verdict"], "no");
    let jordan = e["certificate"]["jordan"].as_array().unwrap();
    assert_eq!(jordan.len(), 2);
}

#[test]
fn embed_check_reversible_gets_split() {
    let dir = tempdir("embed-rev");
    // Positive symplectic squeezing channel.
    let squeeze = r#"{"schema_version":"1","n":1,"label":"squeeze","x":[[2.0,0.0],[0.0,0.5]],"y":[[0.0,0.0],[0.0,0.0]]}"#;
    write(&dir, "s.json", squeeze);
    let out = run_in(&dir, &["embed-check", "s.json", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "in_exp_sp" && c["verdict"] == "yes"));
    let split = checks.iter().find(|c| c["name"] == "split_exp_sp").unwrap();
    assert!(split["certificate"]["product_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn embed_check_minus_identity_guard() {
    let dir = tempdir("embed-minus");
    let minus = r#"{"schema_version":"1","n":1,"label":"-I","x":[[-1.0,0.0],[0.0,-1.0]],"y":[[0.0,0.0],[0.0,0.0]]}"#;
    write(&dir, "m.json", minus);
    let out = run_in(&dir, &["embed-check", "m.json", "--json"]);
    assert_eq!(out.status.code(), Some(0), "embeddable_x says yes for -I");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "embeddable_x" && c["verdict"] == "yes"));
    assert!(checks.iter().any(|c| c["name"] == "in_exp_sp" && c["verdict"] == "indeterminate"));
}

#[test]
fn classify_reports_idempotent_normal_form() {
    let dir = tempdir("idem");
    // State preparation on one mode: X = 0, Y = 2.5 I.
    let prep = r#"{"schema_version":"1","n":1,"label":"preparation","x":[[0.0,0.0],[0.0,0.0]],"y":[[2.5,0.0],[0.0,2.5]]}"#;
    write(&dir, "prep.json", prep);
    let out = run_in(&dir, &["classify", "prep.json", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let idem = checks.iter().find(|c| c["name"] == "idempotent").unwrap();
    assert_eq!(idem["verdict"], "true");
    assert_eq!(idem["certificate"]["identity_modes"], 0);
    let ys = idem["certificate"]["noise_eigenvalues"].as_array().unwrap();
    assert!((ys[0].as_f64().unwrap() - 2.5).abs() < 1e-8);
    let gauge = checks.iter().find(|c| c["name"] == "gauge_case").unwrap();
    assert!(gauge["verdict"].as_str().unwrap().starts_with("i "));
}

#[test]
fn tolerance_env_override() {
    let dir = tempdir("tolenv");
    write(&dir, "att.json", ATTENUATION);
    let out = Command::new(bin())
        .args(["check", "att.json", "--json"])
        .current_dir(&dir)
        .env("GAUSSCHAN_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["tolerance"].as_f64().unwrap(), 1e-6);

    let bad = Command::new(bin())
        .args(["check", "att.json"])
        .current_dir(&dir)
        .env("GAUSSCHAN_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn flag_overrides_env_tolerance() {
    let dir = tempdir("tolflag");
    write(&dir, "att.json", ATTENUATION);
    let out = Command::new(bin())
        .args(["check", "att.json", "--json", "--tol", "1e-7"])
        .current_dir(&dir)
        .env("GAUSSCHAN_TOL", "1e-5")
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["tolerance"].as_f64().unwrap(), 1e-7);
}
