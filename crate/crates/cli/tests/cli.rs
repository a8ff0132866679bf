//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gencoh"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

const PLUS2: &str = r#"{"dim": 2, "psi": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]}"#;
const PLUS3: &str = r#"{"dim": 3, "psi": [[0.5773502691896258, 0.0], [0.5773502691896258, 0.0], [0.5773502691896258, 0.0]]}"#;
const CHI3: &str = r#"{"dim": 3, "psi": [[0.7071067811865476, 0.0], [0.5, 0.0], [0.5, 0.0]]}"#;
const RHO_ACTIVATED: &str =
    r#"{"dim": 2, "rho": [[[0.75, 0.0], [0.25, 0.0]], [[0.25, 0.0], [0.25, 0.0]]]}"#;
const PSI_SQRT3: &str = r#"{"dim": 2, "psi": [[0.8660254037844386, 0.0], [0.5, 0.0]]}"#;
const SCHUR_THIRD: &str = r#"{"dim": 2, "schur": [[[1.0, 0.0], [0.5773502691896258, 0.0]], [[0.5773502691896258, 0.0], [1.0, 0.0]]]}"#;
const ERASING2: &str = r#"{"dim": 2, "kraus": [
    [[[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
    [[[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
], "tp": true}"#;

#[test]
fn measure_cr_of_plus2_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "plus2.json", PLUS2);
    let out = bin()
        .args(["measure", "--state"])
        .arg(&state)
        .args(["--measure", "cr"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["measure"], "cr");
}

#[test]
fn measure_all_kinds_run() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "plus2.json", PLUS2);
    for (measure, expected) in [
        ("l1", 1.0),
        ("dephase", 1.0 / 2.0f64.sqrt()),
        ("mindist", 1.0 / 2.0f64.sqrt()),
        ("wy", 0.25),
    ] {
        let out = bin()
            .args(["measure", "--state"])
            .arg(&state)
            .args(["--measure", measure])
            .output()
            .unwrap();
        assert!(out.status.success(), "measure {measure} failed");
        let v = stdout_json(&out);
        assert!(
            (v["value"].as_f64().unwrap() - expected).abs() < 1e-6,
            "measure {measure}: {v}"
        );
    }
    // Custom Hamiltonian for the skew information.
    let out = bin()
        .args(["measure", "--state"])
        .arg(&state)
        .args(["--measure", "wy", "--h", "0,2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn classify_erasing_channel() {
    let dir = tempfile::tempdir().unwrap();
    let channel = write(dir.path(), "erasing.json", ERASING2);
    let out = bin()
        .args(["classify", "--channel"])
        .arg(&channel)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["fio"], "Yes");
    assert_eq!(v["gio"], "No");
    assert_eq!(v["dio"], "Yes");
    assert_eq!(v["io"], "WitnessYes");
    assert_eq!(v["sio"], "No");
}

#[test]
fn convert_gio_pure_to_mixed_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let from = write(dir.path(), "psi.json", PSI_SQRT3);
    let to = write(dir.path(), "rho.json", RHO_ACTIVATED);
    let out = bin()
        .args(["convert", "--from"])
        .arg(&from)
        .arg("--to")
        .arg(&to)
        .args(["--family", "gio"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "Feasible");
    assert_eq!(v["probability"], 1.0);
    let a01 = &v["channel"]["schur"][0][1];
    assert!((a01[0].as_f64().unwrap() - 1.0 / 3.0f64.sqrt()).abs() < 1e-9);
}

#[test]
fn convert_gio_infeasible_reports_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let from = write(dir.path(), "plus2.json", PLUS2);
    let to = write(dir.path(), "rho.json", RHO_ACTIVATED);
    let out = bin()
        .args(["convert", "--from"])
        .arg(&from)
        .arg("--to")
        .arg(&to)
        .args(["--family", "gio"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "Infeasible");
    assert!(v["certificate"].as_str().unwrap().contains("diagonal"));
}

#[test]
fn convert_sgio_probability() {
    let dir = tempfile::tempdir().unwrap();
    let from = write(dir.path(), "chi.json", CHI3);
    let to = write(dir.path(), "plus3.json", PLUS3);
    let out = bin()
        .args(["convert", "--from"])
        .arg(&from)
        .arg("--to")
        .arg(&to)
        .args(["--family", "sgio"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["probability"].as_f64().unwrap() - 0.75).abs() < 1e-9);
}

#[test]
fn convert_fio_stochastic_reports_bound() {
    let dir = tempfile::tempdir().unwrap();
    let from = write(dir.path(), "plus3.json", PLUS3);
    let to = write(dir.path(), "chi.json", CHI3);
    let out = bin()
        .args(["convert", "--from"])
        .arg(&from)
        .arg("--to")
        .arg(&to)
        .args(["--family", "fio", "--stochastic"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    // Equal ranks: the permutation-optimized bound is exact.
    assert_eq!(v["sfio_bound"]["tight"], true);
    assert!((v["sfio_bound"]["probability"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn decompose_schur_and_structured_failure() {
    let dir = tempfile::tempdir().unwrap();
    let schur = write(dir.path(), "schur.json", SCHUR_THIRD);
    let out = bin()
        .args(["decompose", "--channel"])
        .arg(&schur)
        .arg("--mixed-unitary")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let weights = v["decomposition"]["weights"].as_array().unwrap();
    assert_eq!(weights.len(), 2);
    let s3 = 1.0 / 3.0f64.sqrt();
    assert!((weights[0].as_f64().unwrap() - (1.0 + s3) / 2.0).abs() < 1e-9);

    // The extremal four-level channel has no decomposition: structured null.
    let k1 = "[[[1.0,0],[0,0],[0,0],[0,0]],[[0,0],[0.5,0],[0,0],[0,0]],[[0,0],[0,0],[0.3333333333333333,0],[0,0]],[[0,0],[0,0],[0,0],[0.25,0]]]";
    let b2 = (1.0f64 - 0.25).sqrt();
    let b3 = (1.0f64 - 1.0 / 9.0).sqrt();
    let b4 = (1.0f64 - 1.0 / 16.0).sqrt();
    let k2 = format!(
        "[[[0,0],[0,0],[0,0],[0,0]],[[0,0],[-{b2},0],[0,0],[0,0]],[[0,0],[0,0],[0,-{b3}],[0,0]],[[0,0],[0,0],[0,0],[{b4},0]]]"
    );
    let extremal = write(
        dir.path(),
        "extremal.json",
        &format!("{{\"dim\": 4, \"kraus\": [{k1}, {k2}], \"tp\": true}}"),
    );
    let out = bin()
        .args(["decompose", "--channel"])
        .arg(&extremal)
        .arg("--mixed-unitary")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["decomposition"].is_null());
    assert!(v["reason"].as_str().unwrap().contains("diagonal unitaries"));
}

#[test]
fn demos_exit_zero() {
    for name in [
        "hadamard-kraus",
        "erasing",
        "pauli-mix",
        "gio-not-pio",
        "activation",
        "appendix-c",
    ] {
        let out = bin().args(["demo", name]).output().unwrap();
        assert!(
            out.status.success(),
            "demo {name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v = stdout_json(&out);
        assert_eq!(v["passed"], true, "demo {name}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["demo", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["measure", "--state", "/nonexistent.json", "--measure", "cr"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"dim\": 2}");
    let out = bin()
        .args(["measure", "--state"])
        .arg(&bad)
        .args(["--measure", "cr"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Tolerance overrides must be positive.
    let out = bin()
        .args(["--eq-tol", "0", "demo", "activation"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_output_is_byte_identical() {
    let run = |seed: &str| {
        bin()
            .args(["--seed", seed, "demo", "plus3-reachable"])
            .output()
            .unwrap()
    };
    let a = run("7");
    let b = run("7");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    // The env fallback drives the seed the same way.
    let via_env = bin()
        .env("COHERE_SEED", "7")
        .args(["demo", "plus3-reachable"])
        .output()
        .unwrap();
    assert_eq!(via_env.stdout, a.stdout);
}

#[test]
fn tolerance_override_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "plus2.json", PLUS2);
    let out = bin()
        .args(["--eq-tol", "1e-8", "--psd-tol", "1e-8", "--opt-tol", "1e-7"])
        .args(["measure", "--state"])
        .arg(&state)
        .args(["--measure", "cr"])
        .output()
        .unwrap();
    assert!(out.status.success());
}
