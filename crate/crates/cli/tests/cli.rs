//! Drives the `fsl` binary as a user would.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn small_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = fsl(&[
        "--case",
        "landau",
        "--set",
        "nx=16",
        "--set",
        "nv=16",
        "--set",
        "t_end=0.5",
        "--out",
        &out_arg(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("config.echo").is_file());
    let csv = fs::read_to_string(out.join("series.csv")).unwrap();
    assert!(csv.starts_with("t,mass,"));
    assert_eq!(csv.lines().count(), 7);
    assert!(out.join("snapshots/f_000000.bin").is_file());
    assert!(out.join("snapshots/f_000005.txt").is_file());
}

#[test]
fn config_file_is_overridden_by_set() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("case.cfg");
    fs::write(&file, "case=two_stream\nnx=16\nnv=16\nt_end=1\n").unwrap();
    let out = dir.path().join("run");
    let o = fsl(&["--config", file.to_str().unwrap(), "--set", "t_end=0.2", "--out", &out_arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let echo = fs::read_to_string(out.join("config.echo")).unwrap();
    assert!(echo.lines().any(|l| l == "case=two_stream"), "{echo}");
    assert!(
        echo.lines().any(|l| l.starts_with("t_end=") && l[6..].parse::<f64>() == Ok(0.2)),
        "{echo}"
    );
}

#[test]
fn dispersion_table_has_five_rows() {
    let o = fsl(&["--dispersion-table"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,omega_r,omega_i,r,phi");
    assert_eq!(lines.len(), 6);
    let row: Vec<f64> = lines[3].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[0], 0.4);
    assert!((row[1] - 1.2850).abs() < 1e-3 && (row[2] + 0.0661).abs() < 1e-3, "{row:?}");
}

#[test]
fn list_cases_names_every_case() {
    let text = stdout(&fsl(&["--list-cases"]));
    for name in ["landau", "two_stream", "bump_on_tail", "kelvin_helmholtz", "hill"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(&dir.path().join("run"));
    for bad in ["dt=-1", "no_such_key=1", "nx=abc"] {
        let o = fsl(&["--case", "landau", "--set", bad, "--out", &out]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn numeric_blow_up_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = fsl(&[
        "--case",
        "landau",
        "--set",
        "nx=16",
        "--set",
        "nv=16",
        "--set",
        "alpha=1e300",
        "--out",
        &out_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(out.join("series.csv").is_file());
}
