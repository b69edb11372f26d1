//! End-to-end checks of the `torus-stri` binary: exit codes, the
//! machine-parsable `error_code=` stderr lines, file emission, and
//! byte-reproducibility of stdout across worker thread counts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-stri"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> &str {
    std::str::from_utf8(&out.stderr).expect("stderr is UTF-8")
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torus-stri-io-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn selftest_exits_clean() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).ends_with("selftest: 9 checks passed\n"));
}

#[test]
fn enumerate_pinned_counts_through_the_binary() {
    let dir = scratch_dir("enumerate");
    let grid = dir.join("grid2x2.txt");
    fs::write(&grid, "0 0 1\n0 1 1\n1 0 1\n1 1 1\n").unwrap();
    let out = run(&[
        "enumerate",
        "--set",
        &format!("file:{}", grid.display()),
        "--tau-histogram",
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout_of(&out),
        "tau,count,weighted_sum\n0,36,3.6000000000000000e1\n"
    );

    let axis = dir.join("axis3.txt");
    fs::write(&axis, "0 0 1\n1 0 1\n2 0 1\n").unwrap();
    let out = run(&[
        "enumerate",
        "--set",
        &format!("file:{}", axis.display()),
        "--tau-histogram",
    ]);
    let lines: Vec<&str> = stdout_of(&out).lines().collect();
    assert!(lines[1].starts_with("0,15,") && lines[2].starts_with("2,4,"));
}

#[test]
fn empty_spectrum_is_a_validation_failure() {
    let dir = scratch_dir("empty");
    let path = dir.join("empty.txt");
    fs::write(&path, "# nothing here\n").unwrap();
    let out = run(&["enumerate", "--set", &format!("file:{}", path.display())]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("empty spectrum"), "{err}");
    assert!(err.contains("error_code=validation"), "{err}");
}

#[test]
fn parse_errors_name_the_line() {
    let dir = scratch_dir("parse");
    let path = dir.join("bad.txt");
    fs::write(&path, "0 0 1\n1 nope 1\n").unwrap();
    let out = run(&["enumerate", "--set", &format!("file:{}", path.display())]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("error_code=validation"), "{err}");
}

#[test]
fn cap_violations_exit_three_and_name_the_cap() {
    let out = run(&["enumerate", "--set", "grid:40", "--backend", "exhaustive"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_of(&out);
    assert!(err.contains("error_code=cap"), "{err}");
    assert!(err.contains("4096"), "cap message should name the cap: {err}");
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("error_code=validation"));

    let out = run(&["strichartz", "--set", "lattice:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("error_code=validation"));
}

#[test]
fn zero_thread_request_is_rejected() {
    let out = bin()
        .args(["extremizer-scan", "--n", "2"])
        .env("TORUS_STRI_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("error_code=validation"));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = scratch_dir("outflag");
    let path = dir.join("scan.csv");
    let to_stdout = run(&["extremizer-scan", "--n", "2,4"]);
    assert!(to_stdout.status.success());
    let to_file = run(&[
        "extremizer-scan",
        "--n",
        "2,4",
        "--out",
        &path.display().to_string(),
    ]);
    assert!(to_file.status.success());
    assert!(stdout_of(&to_file).is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout_of(&to_stdout));
}

#[test]
fn incidence_decompose_matches_the_decompose_subcommand() {
    let a = run(&["incidence", "--set", "grid:4", "--decompose"]);
    let b = run(&["decompose", "--set", "grid:4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout_of(&a), stdout_of(&b));
    assert!(stdout_of(&a).starts_with("n,l2_norm,halved\n"));
}

#[test]
fn nls_run_emits_trajectory_summary_and_stdout_copy() {
    let dir = scratch_dir("nls");
    let config = dir.join("run.json");
    fs::write(
        &config,
        r#"{"N0": 4, "s": 0.4, "delta": 0.05, "sign": "defocusing",
            "dt": 0.005, "windows": 2, "K_probe": 2, "seed": 11}"#,
    )
    .unwrap();
    let out_dir = dir.join("runout");
    let out = run(&[
        "nls",
        "--config",
        &config.display().to_string(),
        "--out-dir",
        &out_dir.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let trajectory = fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(trajectory.starts_with("t,mass,hamiltonian,hs_norm,window_index,growth_factor\n"));
    assert!(trajectory.lines().count() > 2);

    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert_eq!(summary, stdout_of(&out));
    let parsed: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert!(parsed["mass_drift_rel"].as_f64().unwrap() <= 1e-12);
    assert!(parsed["k_obs"].as_f64().unwrap().is_finite());

    let bad = run(&["nls", "--config", &dir.join("missing.json").display().to_string()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn stdout_bytes_are_thread_count_invariant() {
    let args = [
        "strichartz",
        "--set",
        "random:60:42:8",
        "--T",
        "0.5",
        "--method",
        "quadrature",
    ];
    let one = bin().args(args).env("TORUS_STRI_THREADS", "1").output().unwrap();
    let two = bin().args(args).env("TORUS_STRI_THREADS", "2").output().unwrap();
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);
}
