use std::path::Path;
use std::process::{Command, Output};

fn ramwalk(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ramwalk"));
    cmd.args(args).env_remove("RAMWALK_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("RAMWALK_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_prints_an_edge_list() {
    let o = ramwalk(&["gen", "--graph", "petersen"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("10 15"));
    assert_eq!(text.lines().count(), 16);
}

#[test]
fn gen_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let p = path.to_str().unwrap();
    let o = ramwalk(&["gen", "--graph", "random", "--n", "30", "--d", "4", "--seed", "7", "--out", p], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let again = ramwalk(&["gen", "--graph", p], None);
    assert_eq!(stdout(&again), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn malformed_edge_file_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "4 2\n0 1\n1 x\n").unwrap();
    let o = ramwalk(&["spectrum", "--graph", path.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn bad_parameters_exit_with_usage_status() {
    assert_eq!(ramwalk(&["gen", "--graph", "no-such-family"], None).status.code(), Some(2));
    assert_eq!(ramwalk(&["gen", "--graph", "random", "--n", "5", "--d", "3"], None).status.code(), Some(2));
    assert_eq!(ramwalk(&["verify"], None).status.code(), Some(2));
    assert_eq!(ramwalk(&["mix", "--graph", "petersen", "--eps", "1.5"], None).status.code(), Some(2));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"graph": {"kind": "named", "name": "petersen"}, "params": {"eps": 2.0}}"#).unwrap();
    let o = ramwalk(&["verify", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("params.eps"), "{}", stderr(&o));
}

#[test]
fn verify_is_deterministic_and_config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"suites": ["spectral", "mixing", "walk"], "params": {"trials": 2000, "blocks": 2000}}"#).unwrap();
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = ramwalk(
            &["verify", "--graph", "petersen", "--suite", "tree", "--seed", "3", "--config", cfg.to_str().unwrap()],
            Some(&out),
        );
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
        let text = std::fs::read_to_string(out.join("report.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["suites"], serde_json::json!(["spectral", "mixing", "walk"]));
        assert_eq!(v["config"]["seed"], 3);
        reports.push(text);
        assert!(out.join("report.txt").exists() && out.join("timing.json").exists());
    }
    assert_eq!(reports[0], reports[1]);

    let summary = ramwalk(&["summary", dir.path().join("a/report.json").to_str().unwrap()], None);
    assert!(summary.status.success(), "{}", stderr(&summary));
    let s: serde_json::Value = serde_json::from_str(&stdout(&summary)).unwrap();
    assert_eq!(s["reports"], 1);
    assert_eq!(s["all_pass"], true);
}

#[test]
fn failing_checks_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // Far above the largest constant the tree bound admits.
    std::fs::write(&cfg, r#"{"params": {"c0": 10.0}}"#).unwrap();
    let o = ramwalk(&["verify", "--graph", "petersen", "--suite", "tree", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("[FAIL] tree/td1"));
}

#[test]
fn summary_rejects_foreign_versions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    std::fs::write(&path, r#"{"version": "other/9"}"#).unwrap();
    let o = ramwalk(&["summary", path.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("version"));
}
