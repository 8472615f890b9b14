use std::path::Path;
use std::process::{Command, Output};

fn hartree(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hartree"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn kernel_check_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = hartree(dir.path(), &["kernel-check"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("kernel-check.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("kato,")));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS rollnik_below_kato"));
}

#[test]
fn self_test_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hartree(dir.path(), &["self-test"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn scatter_csv_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["scatter", "--grid", "16,24", "--T", "4", "--dt", "0.02", "--eps", "0.2,0.1"];
    assert_eq!(code(&hartree(a.path(), &args)), 0);
    assert_eq!(code(&hartree(b.path(), &args)), 0);
    let x = std::fs::read(a.path().join("scatter.csv")).unwrap();
    let y = std::fs::read(b.path().join("scatter.csv")).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "[grid]\nn = 16\nlength = 16\n[time]\nt = 0.5\ndt = 0.01\n[evolve]\nkind = free\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hartree"))
        .args(["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "evolve", "--dt", "0.05"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("kind=free steps=10"), "{stdout}");
    assert!(dir.path().join("evolve.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hartree(dir.path(), &["no-such-command"])), 1);
    assert_eq!(code(&hartree(dir.path(), &["evolve", "--grid", "16"])), 1);
    assert_eq!(code(&hartree(dir.path(), &["evolve", "--kind", "warp"])), 1);
    let missing = Command::new(env!("CARGO_BIN_EXE_hartree"))
        .args(["--config", "/nonexistent/run.cfg", "kernel-check"])
        .output()
        .unwrap();
    assert_ne!(code(&missing), 0);
    // |Q0| >= mu0 breaks the smallness condition: a guard, not a usage error
    assert_eq!(code(&hartree(dir.path(), &["evolve", "--model", "2,1,1,1", "--grid", "8,8"])), 2);
    let help = Command::new(env!("CARGO_BIN_EXE_hartree")).arg("--help").output().unwrap();
    assert_eq!(code(&help), 0);
    assert!(String::from_utf8_lossy(&help.stdout).contains("Exit codes"));
}

#[test]
fn failed_gate_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // a 16-point box wraps the dispersing wave long before the decay window
    let o = hartree(dir.path(), &["decay", "--grid", "16,16", "--dt", "0.02"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}
