use std::process::Command;

fn thermovar() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermovar"))
}

#[test]
fn bounds_table_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let status = thermovar()
        .args(["bounds-table", "--beta", "1,2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("bounds-table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8 * 3 * 2);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bounds-table.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["bounds.beta"], "1,2");
    assert_eq!(meta["all_checks_passed"], true);
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# short run\nexperiment.id = ising-sweep\nmodel.ansatz = ising1\ntrain.restarts = 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = thermovar()
        .args([
            "ising-sweep",
            "--beta",
            "2",
            "--max-iters",
            "5",
            "--shots",
            "100",
            "--config",
        ])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    // Five iterations are not enough to pass the published thresholds.
    assert_eq!(status.code(), Some(2));
    let csv = std::fs::read_to_string(out.join("ising-sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(!rows.is_empty() && rows.len() <= 2 * 6);
    assert!(rows
        .iter()
        .all(|r| r.starts_with("ising-sweep,ising/ising1,5,1,5,0,2,2.0000000000000000e0,")));
    let meta = std::fs::read_to_string(out.join("ising-sweep.meta.json")).unwrap();
    assert!(meta.contains("\"loss.shots\": \"100\""));
}

#[test]
fn rejects_mismatched_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "experiment.id = xy-sweep\n").unwrap();
    let output = thermovar()
        .args(["ising-sweep", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("xy-sweep"));
}
