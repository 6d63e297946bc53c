use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ckn-symbreak"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constants_reports_threshold() {
    let o = run(&["constants", "--n", "4", "--s", "0.5", "--q", "2.5", "--mu", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["result"];
    assert_eq!(r["cs"].as_f64().unwrap(), 1.0);
    assert!((r["c_mu"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!((r["threshold"].as_f64().unwrap() - 11.4721508).abs() < 1e-6);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["frobnicate"],
        vec!["constants", "--n", "x"],
        vec!["constants", "--unknown-flag", "1"],
        vec!["constants", "--s", "1.2"],
        vec!["check", "--suite", "nope"],
        vec!["constants", "--config", "/nonexistent/run.cfg"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["constants", "--n", "x"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--n"));
}

#[test]
fn help_and_version_exit_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("--lambda-min"));
    let o = run(&["--version"]);
    assert_eq!(stdout(&o).trim(), format!("ckn-symbreak {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn failed_check_exits_two() {
    // c_hat far below the true constant makes the slice inequality fail
    let o = run(&["check", "--suite", "extension", "--n", "4", "--s", "0.5", "--c-hat", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).lines().any(|l| l.ends_with(",false")));
}

#[test]
fn files_written_and_config_merged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "subcommand = check\nsuite = constants\nseed = 3\n").unwrap();
    let json = dir.path().join("out.json");
    let csv = dir.path().join("out.csv");
    let o = run(&["--config", cfg.to_str().unwrap(), "--suite", "halfline", "--json", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table, stdout(&o));
    assert!(table.starts_with(&format!("# ckn-symbreak v{} check\n", env!("CARGO_PKG_VERSION"))));
    assert!(table.contains("halfline(s=0.5,x=1)"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["config"]["suite"], "halfline");
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["passed"], true);
}

#[test]
fn sweep_csv_and_grid_env() {
    let o = bin()
        .env("CKN_GRID_NODES", "1024")
        .args(["sweep", "--lambda-min", "0", "--lambda-max", "12", "--points", "3", "--bisect-tol", "4"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], format!("# ckn-symbreak v{} sweep", env!("CARGO_PKG_VERSION")));
    assert!(lines[1].starts_with("# lambda_hat bracket = (0, "));
    let header = lines.iter().position(|l| l.starts_with("lambda,")).unwrap();
    assert_eq!(lines[header], "lambda,Q_u,Q_tilde,margin,verdict,tolerance,el_residual");
    assert!(lines[header + 1].starts_with("0,") && lines[header + 1].contains(",stable,"));
    assert!(lines.last().unwrap().starts_with("12,") && lines.last().unwrap().contains(",unstable,"));
}
