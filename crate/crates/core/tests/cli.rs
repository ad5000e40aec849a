use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_noma-pc");

fn config(dir: &std::path::Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(
        &path,
        format!(
            "users_per_cell = 4\nnum_subchannels = 2\nbudgets_dbm = [30.0, 40.0]\n\
             algorithm = \"power-min\"\nseed = 1\n{extra}"
        ),
    )
    .unwrap();
    path
}

#[test]
fn fixtures_pass() {
    let out = Command::new(BIN).arg("--fixtures").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        5,
        "{text}"
    );
}

#[test]
fn run_writes_summary_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let out_dir = dir.path().join("out");
    let status = Command::new(BIN)
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("3,30,power-min,SW,"));
    for line in summary.lines().skip(1) {
        let trace = line.rsplit(',').next().unwrap();
        assert!(out_dir.join(trace).exists(), "{trace}");
    }
}

#[test]
fn overrides_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let out = Command::new(BIN)
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--algo",
            "rate-max",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert_eq!(rows[0]["algorithm"], "rate-max");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "unknown_key = 1\n");
    let status = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(BIN)
        .args(["run", "/no/such/file.toml"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let cfg = config(dir.path(), "users_per_subchannel = 3\n");
    let status = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap(), "--algo", "x"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
