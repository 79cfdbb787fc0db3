//! End-to-end tests of the `isoprof` binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isoprof"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("isoprof"));
}

#[test]
fn usage_errors_exit_two() {
    // missing required argument
    let o = run(&["radial", "--alpha", "2.0"]);
    assert_eq!(o.status.code(), Some(2));
    // clap-level unknown subcommand
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    // domain-level bad value
    let o = run(&["profile", "--alpha", "2.0", "--a", "0.3", "--kind", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bound", "--n", "3", "--alpha", "2.0", "--a", "0.3", "--route", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "alpha = 0.5\nn_list = [2]\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--config", "/nonexistent/x.toml", "sweep"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn radial_reports_closed_form_mode() {
    let o = run(&["radial", "--n", "3", "--alpha", "2.0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((v["mode"].as_f64().unwrap() - 1.0) < 1e-10);
    assert_eq!(v["n"], 3);
}

#[test]
fn profile_matches_library() {
    let o = run(&["profile", "--alpha", "1.0", "--a", "0.25"]);
    assert!(o.status.success());
    let got: f64 = stdout(&o).trim().parse().unwrap();
    assert!((got - 0.25).abs() < 1e-8);
}

#[test]
fn bound_emits_parsable_certificate() {
    let o = run(&["bound", "--n", "3", "--alpha", "2.0", "--a", "0.3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert_eq!(v["route"], "theorem_muphi");
    assert!(v["constants_used"].as_array().unwrap().len() > 0);
    assert!(v["validity"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn witness_emits_csv() {
    let o = run(&["witness", "--n", "3", "--alpha", "2.0", "--a", "0.3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.trim().lines().collect();
    assert_eq!(lines[0], "family,parameter,perimeter");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("ball,"));
    assert!(lines[2].starts_with("halfspace,"));
    for line in &lines[1..] {
        let per: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(per > 0.0);
    }
}

#[test]
fn sample_is_deterministic_and_needs_out() {
    let o = run(&["sample", "--n", "3", "--alpha", "2.0", "--count", "50", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let f1 = dir.path().join("a.txt");
    let f2 = dir.path().join("b.txt");
    for f in [&f1, &f2] {
        let o = run(&[
            "--out", f.to_str().unwrap(),
            "sample", "--n", "3", "--alpha", "2.0", "--count", "50", "--seed", "9",
        ]);
        assert!(o.status.success());
    }
    let x = std::fs::read(&f1).unwrap();
    assert_eq!(x, std::fs::read(&f2).unwrap());
    let text = String::from_utf8(x).unwrap();
    assert_eq!(text.lines().count(), 50);
    assert_eq!(text.lines().next().unwrap().split(' ').count(), 3);
}

fn run_sweep_into(dir: &Path, config: &Path) {
    let o = run(&["--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap(), "sweep"]);
    assert!(o.status.success(), "sweep failed: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "alpha = 2.0\nn_list = [2, 5]\na_grid = \"1e-3:0.5:4\"\n").unwrap();
    let d1 = dir.path().join("r1");
    let d2 = dir.path().join("r2");
    run_sweep_into(&d1, &cfg);
    run_sweep_into(&d2, &cfg);
    for f in ["bounds.csv", "checks.csv", "constants.json", "config_resolved.toml"] {
        let x = std::fs::read(d1.join(f)).unwrap();
        let y = std::fs::read(d2.join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    let bounds = std::fs::read_to_string(d1.join("bounds.csv")).unwrap();
    assert!(bounds.starts_with("n,a,route,lower_bound,upper_bound,ratio\n"));
}

#[test]
fn verify_paper_passes_on_default_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "alpha = 2.0\nn_list = [1, 2, 10]\n").unwrap();
    let out = dir.path().join("report");
    let o = run(&[
        "--config", cfg.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
        "verify-paper",
    ]);
    assert!(
        o.status.success(),
        "verify-paper failed:\n{}{}",
        stdout(&o),
        String::from_utf8_lossy(&o.stderr)
    );
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.lines().count() > 10);
    assert!(!report.contains(",fail,"));
}
