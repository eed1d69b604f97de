use std::path::Path;
use std::process::Command;

fn imexflow(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_imexflow"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn run_mms(out: &Path, extra: &[&str]) -> std::process::Output {
    let out = out.to_str().unwrap();
    let mut args = vec!["run", "--case", "mms", "--nx", "4", "--ny", "4", "--t-end", "0.2", "--output", out];
    args.extend_from_slice(extra);
    imexflow(&args)
}

#[test]
fn unknown_subcommand_fails_with_usage() {
    let out = imexflow(&["bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn run_writes_snapshots_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_mms(dir.path(), &["--dt", "0.05", "--snapshot-every", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["config.txt", "energy.csv", "snapshot_000000.vtk", "snapshot_000004.vtk"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let energy = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert_eq!(energy.lines().count(), 1 + 5);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    std::fs::write(&file, "# desk run\nscheme = bdf1\ndt = 0.001\nnx = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run_mms(&out_dir, &["--config", file.to_str().unwrap(), "--dt", "0.1", "--set", "max_iter=500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written = std::fs::read_to_string(out_dir.join("config.txt")).unwrap();
    for line in ["scheme = bdf1", "dt = 0.1", "nx = 4", "max_iter = 500"] {
        assert!(written.lines().any(|l| l == line), "missing `{line}` in\n{written}");
    }
}

#[test]
fn config_errors_exit_nonzero_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_mms(dir.path(), &["--set", "nonsense=1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
    let out = imexflow(&["run", "--case", "rayleigh-taylor", "--scheme", "fs1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("scheme"));
}

#[test]
fn identical_runs_write_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert!(run_mms(d.path(), &["--dt", "0.05", "--scheme", "fs1", "--snapshot-every", "4"]).status.success());
    }
    for f in ["energy.csv", "snapshot_000004.vtk"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn verify_reports_verdicts() {
    let out = imexflow(&["verify", "--taus", "0.1,10", "--steps", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.contains(": pass")).count(), 6, "{text}");
}

#[test]
fn rates_on_a_short_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rates.csv");
    let out = imexflow(&["rates", "--scheme", "fs1", "--levels", "3", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 4);
}
