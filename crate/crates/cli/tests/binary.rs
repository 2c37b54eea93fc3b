use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_inhomkg"))
}

#[test]
fn list_prints_every_suite() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("algebra"));
}

#[test]
fn passing_suite_exits_zero_and_writes_reports() {
    let dir = std::env::temp_dir().join(format!("inhomkg-bin-{}", std::process::id()));
    let out = bin().args(["composition", "--seed", "3", "--out"]).arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("composition.json").exists());
    assert!(dir.join("composition_cases.csv").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failing_suite_exits_one() {
    let cfg = std::env::temp_dir().join(format!("inhomkg-fail-{}.cfg", std::process::id()));
    std::fs::write(&cfg, "tolerance.rce_derivative_relative_error = 1e-7\n").unwrap();
    let out = bin().arg("rce-derivative").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&cfg).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    let cfg = std::env::temp_dir().join(format!("inhomkg-bad-{}.cfg", std::process::id()));
    std::fs::write(&cfg, "lattice.metric = wobbly\n").unwrap();
    let out = bin().arg("lattice").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lattice.metric"));
    std::fs::remove_file(&cfg).unwrap();
    assert_eq!(bin().arg("wobble").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["algebra", "--tolerance", "-1"]).output().unwrap().status.code(), Some(2));
}
