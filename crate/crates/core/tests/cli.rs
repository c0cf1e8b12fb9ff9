use std::process::Command;

fn idlegrad() -> Command {
    Command::new(env!("CARGO_BIN_EXE_idlegrad"))
}

#[test]
fn check_passes() {
    let out = idlegrad().args(["check", "--seed", "3"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn preset_writes_a_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = idlegrad().args(["preset", "remark2", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["name"], "remark2");
    assert!(dir.path().join("trace_standard_0000.csv").exists());
}

#[test]
fn run_and_bounds_read_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{ "preset": "table1", "seed": 36 }"#).unwrap();
    let bounds = idlegrad().args(["bounds", "--config"]).arg(&cfg).output().unwrap();
    assert!(bounds.status.success());
    let v: serde_json::Value = serde_json::from_slice(&bounds.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);

    let out = dir.path().join("out");
    let run = idlegrad().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(out.join("table.csv").exists());
}

#[test]
fn unknown_preset_exits_with_usage_error() {
    let out = idlegrad().args(["preset", "nope", "--out", "/nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
