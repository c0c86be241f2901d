//! End-to-end checks of the command-line binary: subcommands, flags, file
//! output, and exit codes.

use std::path::Path;
use std::process::Command;

fn trsqp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trsqp"))
}

#[test]
fn run_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = trsqp()
        .args([
            "run",
            "--problem",
            "HS7",
            "--mode",
            "nonoise",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("trace_HS7_nonoise_rep0.csv").exists());
    assert!(dir.path().join("summary.json").exists());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Converged"), "stdout: {text}");
}

#[test]
fn run_supports_noise_flags_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = trsqp()
        .args([
            "run",
            "--problem",
            "HS6",
            "--mode",
            "relaxed",
            "--mode",
            "classic",
            "--eps-f",
            "0.05",
            "--eps-c",
            "0.05",
            "--eps-g",
            "0.05",
            "--eps-a",
            "0.05",
            "--seed",
            "7",
            "--delta0",
            "0.5",
            "--max-iters",
            "60",
            "--reps",
            "2",
            "--format",
            "json",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for mode in ["relaxed", "classic"] {
        for rep in 0..2 {
            assert!(dir.path().join(format!("trace_HS6_{mode}_rep{rep}.json")).exists());
        }
    }
}

#[test]
fn scenario_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = trsqp()
        .args(["scenario", "benign", "--reps", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("BYRDSPHR"));
}

#[test]
fn unknown_problem_exits_with_config_code() {
    let out = trsqp()
        .args(["run", "--problem", "NO_SUCH_PROBLEM"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown problem"), "stderr: {err}");
}

#[test]
fn bad_flag_exits_with_clap_code() {
    let out = trsqp().args(["run", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let out = trsqp().args(["scenario", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_subcommand_passes_on_builtins() {
    let out = trsqp().arg("check").output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all checks passed"), "stdout: {text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn reruns_are_byte_identical_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out_dir: &Path| {
        let st = trsqp()
            .args([
                "run",
                "--problem",
                "HS7",
                "--mode",
                "relaxed",
                "--eps-f",
                "0.1",
                "--eps-c",
                "0.1",
                "--eps-g",
                "0.1",
                "--eps-a",
                "0.1",
                "--delta0",
                "1e-7",
                "--max-iters",
                "150",
                "--out",
            ])
            .arg(out_dir)
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read(out_dir.join("trace_HS7_relaxed_rep0.csv")).unwrap()
    };
    let first = run(dir.path());
    let second = run(dir.path());
    assert_eq!(first, second);
}
