use std::process::Command;

fn aedg() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_aedg"));
    c.env("RUST_LOG", "warn");
    c
}

#[test]
fn prints_version() {
    let out = aedg().arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("aedg "));
}

#[test]
fn converge_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = aedg()
        .args(["converge", "--scenario", "scholte", "--q", "2", "--ladder", "2,3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("rates over 2 finest"), "{stdout}");
    let errors = std::fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert!(errors.starts_with("N,h,dt,steps,psi,p,u,v"));
    assert_eq!(errors.lines().count(), 3);
    assert!(dir.path().join("rates.csv").exists());
    assert!(dir.path().join("metadata.toml").exists());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "scenario = \"standing_wave\"\nq = 2\nladder = [2]\nfinal_time = 0.1\n").unwrap();
    let out = aedg()
        .args(["energy-audit", "--flux", "upwind", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("audit"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("steps with growth above"));
    assert!(dir.path().join("audit/audit.csv").exists());
}

#[test]
fn rejects_bad_input() {
    let out = aedg().args(["run", "--scenario", "tsunami"]).output().unwrap();
    assert!(!out.status.success());
    let out = aedg().args(["invert", "--scenario", "snell"]).output().unwrap();
    assert!(!out.status.success());
    let out = aedg().arg("run").output().unwrap();
    assert!(!out.status.success());
}
