use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pohc::harness::ScenarioConfig;

fn pohc(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pohc"));
    cmd.args(args).env_remove("POHC_THREADS");
    if let Some(t) = threads {
        cmd.env("POHC_THREADS", t);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn small_config(dir: &Path) -> String {
    let mut cfg = ScenarioConfig::baseline();
    cfg.horizon = 15;
    let path = dir.join("scenario.json");
    fs::write(&path, cfg.to_json_pretty()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_accepts_valid_and_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    assert_eq!(code(&pohc(&["check", "--config", &cfg], None)), 0);

    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cfg).unwrap()).unwrap();
    doc["voting"]["typo_field"] = serde_json::json!(1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, doc.to_string()).unwrap();
    let out = pohc(&["check", "--config", bad.to_str().unwrap()], None);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("voting") && err.contains("typo_field"), "{err}");

    assert_eq!(code(&pohc(&["check", "--config", "/nonexistent.json"], None)), 2);
    assert_eq!(code(&pohc(&["check"], None)), 2);
}

#[test]
fn run_writes_outputs_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = pohc(
            &["run", "--config", &cfg, "--seed", "7", "--out", out.to_str().unwrap()],
            None,
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["metrics.csv", "flags.csv", "ledger.csv", "manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    let metrics = fs::read_to_string(a.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 16);
}

#[test]
fn runtime_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = pohc(
        &["run", "--config", &cfg, "--seed", "1", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn sweep_runs_each_value_and_honours_thread_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let serial = dir.path().join("serial");
    let threaded = dir.path().join("threaded");
    let args = |out: &Path| {
        vec![
            "sweep".to_string(),
            "--config".into(),
            cfg.clone(),
            "--param".into(),
            "voting.honest_noise".into(),
            "--values".into(),
            "0.05,0.2".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let run = |out: &Path, t| {
        let a = args(out);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        pohc(&refs, t)
    };
    assert_eq!(code(&run(&serial, None)), 0);
    assert_eq!(code(&run(&threaded, Some("2"))), 0);
    assert_eq!(
        fs::read(serial.join("sweep.csv")).unwrap(),
        fs::read(threaded.join("sweep.csv")).unwrap()
    );
    assert!(serial.join("voting.honest_noise=0.2").join("metrics.csv").exists());
    assert_eq!(code(&run(&dir.path().join("x"), Some("zero"))), 2);

    let o = pohc(
        &[
            "sweep",
            "--config",
            &cfg,
            "--param",
            "voting.bogus",
            "--values",
            "1",
            "--out",
            "/tmp/unused",
        ],
        None,
    );
    assert_eq!(code(&o), 2);
}
