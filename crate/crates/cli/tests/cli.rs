//! End-to-end tests of the binary: exit-status contract, output shapes, and
//! byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fock-complex"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fixtures() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fock-complex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_fixture(name: &str, contents: &str) -> PathBuf {
    let path = fixtures().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const ALPHA_N2: &str =
    r#"{"n":2,"p":1,"components":{"1":{"n":2,"terms":[{"z":[0,0],"re":"1","im":"0"}]}}}"#;
const ALPHA_N1: &str =
    r#"{"n":1,"p":1,"components":{"1":{"n":1,"terms":[{"z":[0],"re":"1","im":"0"}]}}}"#;
const BETA: &str = r#"{"n":2,"p":1,"components":{"1":{"n":2,"terms":[{"z":[0,2],"re":"1","im":"0"}]},"2":{"n":2,"terms":[{"z":[2,0],"re":"-1","im":"0"}]}}}"#;
const NOT_CLOSED: &str =
    r#"{"n":2,"p":1,"components":{"1":{"n":2,"terms":[{"z":[0,1],"re":"1","im":"0"}]}}}"#;

#[test]
fn spectrum_csv_rows() {
    let out = run(&[
        "spectrum", "--n", "2", "--p", "1", "--mmax", "2", "--format", "csv",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "eigenvalue,multiplicity\n1,2\n2,4\n3,6\n");
}

#[test]
fn spectrum_warns_at_p_zero() {
    let out = run(&[
        "spectrum", "--n", "1", "--p", "0", "--mmax", "1", "--format", "csv",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "eigenvalue,multiplicity\n0,1\n1,1\n");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0 is in the spectrum"));
}

#[test]
fn spectrum_rejects_p_above_n() {
    let out = run(&["spectrum", "--n", "2", "--p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("p = 3"));
}

#[test]
fn spectrum_numeric_cross_check() {
    let out = run(&[
        "spectrum", "--n", "2", "--p", "2", "--mmax", "3", "--verify",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["numeric_check"]["ok"], serde_json::json!(true));
    assert!(v["numeric_check"]["max_eigenvalue_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_kohn_morrey_reproduces_the_fixture_torsion() {
    let out = run(&[
        "verify",
        "kohn-morrey",
        "--weight",
        "1|z|^4",
        "--n",
        "1",
        "--seed",
        "7",
        "--cases",
        "5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["seed"], serde_json::json!(7));
    assert_eq!(v["passed"], serde_json::json!(true));
    let torsion = v["cases"][0]["report"]["torsion"].as_f64().unwrap();
    assert!((torsion - 1.3484).abs() < 1e-3);
}

#[test]
fn verify_basic_estimate_passes_exactly() {
    let out = run(&[
        "verify",
        "basic-estimate",
        "--n",
        "2",
        "--p",
        "1",
        "--degree",
        "4",
        "--cases",
        "20",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for case in v["cases"].as_array().unwrap() {
        assert_eq!(case["identity_exact"], serde_json::json!(true));
        assert_eq!(case["estimate_exact"], serde_json::json!(true));
    }
}

#[test]
fn verify_energy_identity_passes_exactly() {
    let out = run(&[
        "verify",
        "energy-identity",
        "--ops",
        "d1^2",
        "--n",
        "1",
        "--cases",
        "20",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], serde_json::json!(true));
}

#[test]
fn verify_commutation_passes_exactly() {
    let out = run(&[
        "verify",
        "commutation",
        "--n",
        "3",
        "--p",
        "2",
        "--cases",
        "10",
    ]);
    assert!(out.status.success());
}

#[test]
fn verify_rejects_unknown_suite() {
    let out = run(&["verify", "does-not-exist", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_dbar_recovers_z1() {
    let input = write_fixture("alpha_n2.json", ALPHA_N2);
    let out = run(&["solve", "dbar", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["residual_norm_sq"], serde_json::json!(0.0));
    assert_eq!(v["kernel_defect"], serde_json::json!(0.0));
    // u0 = z1: one term with exponents [1, 0] and unit coefficient.
    let terms = &v["solution"]["components"][""]["terms"];
    assert_eq!(terms[0]["z"], serde_json::json!([1, 0]));
    assert_eq!(terms[0]["re"], serde_json::json!("1"));
    // Norm equality at p = 1.
    assert!((v["norm_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn solve_d_gives_half_z_squared() {
    let input = write_fixture("alpha_n1.json", ALPHA_N1);
    let out = run(&[
        "solve",
        "d",
        "--ops",
        "d1^2",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["exact_block_path"], serde_json::json!(true));
    let terms = &v["solution"]["components"][""]["terms"];
    assert_eq!(terms[0]["z"], serde_json::json!([2]));
    assert_eq!(terms[0]["re"], serde_json::json!("1/2"));
}

#[test]
fn solve_dstar_fixture_residual_below_tolerance() {
    let input = write_fixture("beta.json", BETA);
    let out = run(&[
        "solve",
        "dstar",
        "--ops",
        "d1^2,d2^2",
        "--input",
        input.to_str().unwrap(),
        "--truncation",
        "8",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["residual_norm_sq"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["kernel_defect"], serde_json::json!(0.0));
}

#[test]
fn solve_rejects_non_closed_input_with_residual() {
    let input = write_fixture("open.json", NOT_CLOSED);
    let out = run(&["solve", "dbar", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not closed"), "stderr: {err}");
    assert!(err.contains("residual"), "stderr: {err}");
}

#[test]
fn moments_cross_check_passes() {
    let out = run(&["moments", "--weight", "1|z1|^2 + 1|z2|^4", "--kmax", "10"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], serde_json::json!(true));
}

#[test]
fn identical_config_and_seed_yield_byte_identical_output() {
    let args = [
        "verify",
        "kohn-morrey",
        "--weight",
        "1|z|^4",
        "--n",
        "1",
        "--seed",
        "42",
        "--cases",
        "8",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let args = [
        "spectrum", "--n", "3", "--p", "2", "--mmax", "4", "--verify",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report_file() {
    let path = fixtures().join("spectrum_report.json");
    let out = run(&[
        "spectrum",
        "--n",
        "2",
        "--p",
        "1",
        "--mmax",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["rows"][0]["multiplicity"], serde_json::json!(2));
}
