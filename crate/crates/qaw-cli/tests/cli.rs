//! End-to-end tests of the `qaw` binary: exit codes, subcommand output,
//! and report determinism through the process boundary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qaw"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("qaw-test-{}-{name}", std::process::id()));
    p
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_default_config_passes() {
    let out = bin()
        .args(["--truncation", "3", "verify"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("\"schema\": 1"));
    assert!(text.contains("\"passed\": true"));
}

#[test]
fn malformed_q_exits_2_naming_the_field() {
    let cfg = tmp("bad-q.json");
    std::fs::write(&cfg, r#"{"q": "2"}"#).unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "verify"])
        .output()
        .unwrap();
    std::fs::remove_file(&cfg).ok();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("q"), "diagnostic must name the field: {err}");
}

#[test]
fn unknown_suite_and_unknown_subcommand_exit_2() {
    let out = bin().args(["--suite", "nonsense", "verify"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_incommensurable_rotations_prints_iii_one() {
    let cfg = tmp("iii1.json");
    std::fs::write(
        &cfg,
        r#"{"blocks": [{"kind":"rotation","lambda":"2","count":1},
                      {"kind":"rotation","lambda":"3","count":1}],
            "truncation": 2, "suites": ["classify"]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "classify"])
        .output()
        .unwrap();
    std::fs::remove_file(&cfg).ok();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("III_1"), "{text}");
    assert!(!text.contains("III_1/"), "no discrete generator expected: {text}");
}

#[test]
fn classify_all_fixed_blocks_prints_ii_one() {
    let cfg = tmp("ii1.json");
    std::fs::write(
        &cfg,
        r#"{"blocks": [{"kind":"fixed","dim":3}], "truncation": 2, "suites": ["classify"]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "classify"])
        .output()
        .unwrap();
    std::fs::remove_file(&cfg).ok();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("II_1"));
}

#[test]
fn moments_prints_covariance_by_both_routes() {
    // B_{21} = -i/3 for the λ = 2 rotation block at the default config
    let out = bin()
        .args(["--truncation", "2", "moments", "2", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("matrix_route"), "{text}");
    assert!(text.contains("partition_route"), "{text}");
    assert_eq!(text.matches(r#""im": "-1/3""#).count(), 2, "{text}");
}

#[test]
fn conjugate_of_free_case_is_the_generator() {
    let cfg = tmp("free.json");
    std::fs::write(
        &cfg,
        r#"{"q": "0", "blocks": [{"kind":"fixed","dim":2}], "truncation": 3}"#,
    )
    .unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "conjugate", "1"])
        .output()
        .unwrap();
    std::fs::remove_file(&cfg).ok();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let fragment: serde_json::Value =
        serde_json::from_str(text.split("\nconjugate vector").next().unwrap()).unwrap();
    let coeffs = fragment["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 1, "free conjugate variable must be e_1: {text}");
    assert_eq!(coeffs[0]["level"], 1);
    assert_eq!(coeffs[0]["word"], serde_json::json!([1]));
    assert_eq!(coeffs[0]["value"]["re"], "1/1");
    assert_eq!(coeffs[0]["value"]["im"], "0/1");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let out_a = tmp("report-a.json");
    let out_b = tmp("report-b.json");
    for (path, _) in [(&out_a, 0), (&out_b, 1)] {
        let out = bin()
            .args([
                "--truncation",
                "3",
                "--suite",
                "fock",
                "--suite",
                "dual",
                "--suite",
                "classify",
                "--output",
                path.to_str().unwrap(),
                "verify",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    std::fs::remove_file(&out_a).ok();
    std::fs::remove_file(&out_b).ok();
    assert_eq!(a, b);
}

#[test]
fn float_mode_runs_modular_suite() {
    let out = bin()
        .args([
            "--arithmetic",
            "float64",
            "--truncation",
            "3",
            "--suite",
            "modular",
            "verify",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("\"sign_s\""), "{text}");
    assert!(text.contains("\"status\": \"pass\""), "{text}");
}
