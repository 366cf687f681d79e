//! Black-box checks of the command-line driver: documented exit codes,
//! byte-identical reruns, and the shapes of the emitted files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfourier"))
        .args(args)
        .output()
        .expect("driver should spawn")
}

/// Per-test output directory, cleared so stale files cannot mask a failure.
fn fresh_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).expect("report file should exist"))
        .expect("report should be valid json")
}

fn line_count(path: &Path) -> usize {
    fs::read_to_string(path).expect("csv should exist").lines().count()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("driver should exit, not be killed")
}

#[test]
fn transform_emits_consistent_files() {
    let dir = fresh_dir("transform-files");
    let out = run(&["--out-dir", dir.to_str().unwrap(), "transform"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report = json(&dir.join("transform_report.json"));
    let retained = report["retained_modes"].as_u64().unwrap() as usize;
    assert_eq!(retained, 35, "default band holds 7 frequencies x 5 spins");
    assert!(report["coeff_round_trip_rel"].as_f64().unwrap() <= 1e-8);
    assert!(report["field_round_trip_rel"].as_f64().unwrap() <= 1e-8);
    assert!(report["plancherel_rel_defect"].as_f64().unwrap() <= 1e-8);

    let coeffs = json(&dir.join("coefficients.json"));
    assert_eq!(coeffs["entries"].as_array().unwrap().len(), retained);
    assert_eq!(line_count(&dir.join("decay.csv")), retained + 1, "header plus one row per mode");
    assert!(dir.join("config_used.json").exists());
}

#[test]
fn constant_field_collapses_to_a_single_entry() {
    let input = Path::new(env!("CARGO_TARGET_TMPDIR")).join("constant_input.json");
    fs::write(&input, r#"{"entries":[{"two_ell":0,"tau":0,"re":[[0.7]],"im":[[0.0]]}]}"#).unwrap();
    let dir = fresh_dir("transform-constant");
    let out = run(&[
        "--out-dir",
        dir.to_str().unwrap(),
        "transform",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let coeffs = json(&dir.join("coefficients.json"));
    let entries = coeffs["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1, "a constant field is one mode");
    assert_eq!(entries[0]["two_ell"].as_u64(), Some(0));
    assert_eq!(entries[0]["tau"].as_i64(), Some(0));
    assert_eq!(line_count(&dir.join("decay.csv")), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let first = fresh_dir("determinism-a");
    let second = fresh_dir("determinism-b");
    for dir in [&first, &second] {
        let out = run(&["--out-dir", dir.to_str().unwrap(), "transform"]);
        assert_eq!(code(&out), 0);
        let out = run(&["--out-dir", dir.to_str().unwrap(), "solve", "--project"]);
        assert_eq!(code(&out), 0);
    }
    for name in [
        "config_used.json",
        "coefficients.json",
        "decay.csv",
        "transform_report.json",
        "solve_report.json",
        "solution_coefficients.json",
    ] {
        let a = fs::read(first.join(name)).unwrap();
        let b = fs::read(second.join(name)).unwrap();
        assert_eq!(a, b, "{name} should not vary between identical runs");
    }
}

#[test]
fn incompatible_data_is_refused_with_exit_two() {
    // The default coefficient is resonant, and raw random data violates its
    // compatibility conditions: the driver must refuse with the documented
    // exit code rather than return a bogus field.
    let dir = fresh_dir("solve-refused");
    let out = run(&["--out-dir", dir.to_str().unwrap(), "solve"]);
    assert_eq!(code(&out), 2, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let dir = fresh_dir("solve-projected");
    let out = run(&["--out-dir", dir.to_str().unwrap(), "solve", "--project"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.join("solve_report.json"));
    assert_eq!(report["projected"].as_bool(), Some(true));
    assert!(!report["resonant_rows"].as_array().unwrap().is_empty());
    let residual = report["residual_sup"].as_f64().unwrap();
    let tolerance = report["residual_tolerance"].as_f64().unwrap();
    assert!(residual <= tolerance);
    println!(
        "[PASS] incompatible data exit code: raw data exits 2, projected data \
         exits 0 with residual {residual:.2e} (tolerance {tolerance:.2e})"
    );
}

#[test]
fn lacunary_mean_demo_is_fully_certified() {
    let config = Path::new(env!("CARGO_TARGET_TMPDIR")).join("liouville_config.json");
    fs::write(&config, r#"{"a": {"a0": {"type": "liouville", "base": 10}}}"#).unwrap();

    let dir = fresh_dir("demo");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
        "demo-nonsolvable",
        "--max-exponent",
        "3",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.join("demo_report.json"));
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3, "one certified witness per exponent");
    for row in rows {
        assert_eq!(row["certified"].as_bool(), Some(true));
        assert_eq!(row["solution_magnitude"].as_f64(), Some(1.0));
    }
    assert_eq!(line_count(&dir.join("demo.csv")), rows.len() + 1);

    let dir = fresh_dir("diophantine-witnesses");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
        "diophantine",
        "--max-exponent",
        "3",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.join("diophantine_report.json"));
    assert_eq!(report["witness_count"].as_u64(), Some(3));
    assert!(dir.join("witnesses.json").exists());
}

#[test]
fn classify_and_conjugate_report_their_verdicts() {
    let dir = fresh_dir("classify");
    let out = run(&["--out-dir", dir.to_str().unwrap(), "classify"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.join("classify_report.json"));
    assert!(!report["full"]["verdict"].is_null());
    assert!(!report["partial"]["verdict"].is_null());

    let dir = fresh_dir("conjugate");
    let out = run(&["--out-dir", dir.to_str().unwrap(), "conjugate"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.join("conjugate_report.json"));
    let residual = report["intertwine_residual"].as_f64().unwrap();
    let tolerance = report["intertwine_tolerance"].as_f64().unwrap();
    assert!(residual <= tolerance);
    assert!(!report["growth"].as_array().unwrap().is_empty());
}
