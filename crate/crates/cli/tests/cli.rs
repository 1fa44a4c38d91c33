//! End-to-end tests of the `ortree` binary: flag handling, exit codes,
//! output formats, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn ortree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ortree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn fit_constant_array_is_one_piece() {
    let dir = tempfile::tempdir().unwrap();
    let mut tensor = String::from("dims: 8 8\n");
    for _ in 0..8 {
        tensor.push_str("3 3 3 3 3 3 3 3\n");
    }
    let input = write_file(dir.path(), "constant.txt", &tensor);
    let out = ortree(&[
        "fit", "--input", &input, "--order", "0", "--lambda", "1", "--family", "rdp",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "objective=1 pieces=1");
}

#[test]
fn fit_step_vector_matches_known_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "step.txt", "dims: 4\n0 0 10 10\n");
    let fitted = dir.path().join("fitted.txt");
    let partition = dir.path().join("partition.json");
    let out = ortree(&[
        "fit",
        "--input",
        &input,
        "--order",
        "0",
        "--lambda",
        "2",
        "--family",
        "hier",
        "--output",
        fitted.to_str().unwrap(),
        "--partition-out",
        partition.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "objective=4 pieces=2");
    let fitted_text = std::fs::read_to_string(&fitted).unwrap();
    assert_eq!(fitted_text, "dims: 4\n0 0 10 10\n");
    let json = std::fs::read_to_string(&partition).unwrap();
    assert!(json.contains("\"lo\""));
    assert!(json.contains("\"coeffs\""));
}

#[test]
fn fit_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let mut tensor = String::from("dims: 8 8\n");
    for i in 0..8 {
        let row: Vec<String> = (0..8).map(|j| format!("{}", ((i * 8 + j) % 5) as f64)).collect();
        tensor.push_str(&row.join(" "));
        tensor.push('\n');
    }
    let input = write_file(dir.path(), "grid.txt", &tensor);
    let base = ortree(&[
        "fit", "--input", &input, "--order", "1", "--lambda", "0.7", "--family", "hier",
    ]);
    let four = ortree(&[
        "fit", "--input", &input, "--order", "1", "--lambda", "0.7", "--family", "hier",
        "--threads", "4",
    ]);
    assert!(base.status.success() && four.status.success());
    assert_eq!(stdout_of(&base), stdout_of(&four));
}

#[test]
fn usage_errors_exit_64() {
    // Missing --lambda.
    let out = ortree(&["fit", "--input", "x.txt", "--order", "0", "--family", "rdp"]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("--lambda"), "stderr: {err}");

    // Unknown scenario.
    let out = ortree(&["simulate", "--scenario", "nope", "--sizes", "8,16"]);
    assert_eq!(out.status.code(), Some(64));

    // Nonpositive lambda.
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "t.txt", "dims: 2\n1 2\n");
    let out = ortree(&[
        "fit", "--input", &input, "--order", "0", "--lambda", "0", "--family", "rdp",
    ]);
    assert_eq!(out.status.code(), Some(64));

    // Unknown check suite.
    let out = ortree(&["check", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn malformed_input_exits_2_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "bad.txt", "dims: 2 2\n1 2 3\n");
    let out = ortree(&[
        "fit", "--input", &input, "--order", "0", "--lambda", "1", "--family", "rdp",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("expected 4 values"), "stderr: {err}");

    // Missing file is a data error too.
    let out = ortree(&[
        "fit", "--input", "/nonexistent/y.txt", "--order", "0", "--lambda", "1", "--family",
        "rdp",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("table.csv");
    let args = [
        "simulate",
        "--scenario",
        "twopiece2d",
        "--sizes",
        "16,32,64",
        "--reps",
        "5",
        "--seed",
        "7",
        "--out",
        out_path.to_str().unwrap(),
    ];
    let first = ortree(&args);
    assert!(first.status.success());
    assert!(stdout_of(&first).starts_with("slope="));
    let bytes_a = std::fs::read(&out_path).unwrap();
    let second = ortree(&args);
    assert!(second.status.success());
    let bytes_b = std::fs::read(&out_path).unwrap();
    assert_eq!(bytes_a, bytes_b);

    let text = String::from_utf8(bytes_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,N,mse_mean,mse_stderr"));
    assert_eq!(text.lines().count(), 5); // header + 3 rows + slope footer
    assert!(text.lines().last().unwrap().starts_with("# slope="));
}

#[test]
fn simulate_noiseless_recovery() {
    let out = ortree(&[
        "simulate",
        "--scenario",
        "twopiece2d",
        "--sizes",
        "8,16",
        "--reps",
        "2",
        "--sigma",
        "0",
        "--lambda-rule",
        "fixed:0.05",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for line in text.lines().skip(1).take(2) {
        let mse: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(mse < 1e-12, "line {line}");
    }
}

#[test]
fn check_suites_pass() {
    for suite in ["gns", "meanbound", "refine"] {
        let out = ortree(&["check", "--suite", suite, "--trials", "50", "--seed", "3"]);
        assert!(out.status.success(), "suite {suite}: {:?}", out);
        let text = stdout_of(&out);
        assert!(text.contains("0 violations"), "suite {suite}: {text}");
    }
}
