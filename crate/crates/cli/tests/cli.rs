use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_isoband")
}

#[test]
fn presets_lists_builtins() {
    let out = Command::new(bin()).arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["free-torus", "diag-half-two", "dirichlet-free-strip"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn run_free_torus_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    // Dump a builtin, shrink it, and run it from the file.
    let dump = Command::new(bin())
        .args(["presets", "--dump", "free-torus"])
        .output()
        .unwrap();
    assert!(dump.status.success());
    let mut spec: serde_json::Value = serde_json::from_slice(&dump.stdout).unwrap();
    spec["solver"]["grid"] = serde_json::json!([16, 16]);
    spec["solver"]["cutoff"] = serde_json::json!(3);
    spec["solver"]["kPoints"] = serde_json::json!(5);
    spec["solver"]["nBands"] = serde_json::json!(3);
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();

    let out_dir = dir.path().join("out");
    let out = Command::new(bin())
        .arg("run")
        .arg(spec_path.to_str().unwrap())
        .arg("--out")
        .arg(out_dir.to_str().unwrap())
        .args(["--verify", "full", "--jobs", "2"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "stdout:\n{stdout}");
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL "));
    assert!(out_dir.join("bands.csv").exists());
    assert!(out_dir.join("report.json").exists());
}

#[test]
fn unknown_spec_exits_with_error_code() {
    let out = Command::new(bin())
        .args(["run", "no-such-thing", "--out", "/tmp/isoband-nowhere"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_reports_stage_medians() {
    let dir = tempfile::tempdir().unwrap();
    let dump = Command::new(bin())
        .args(["presets", "--dump", "free-torus"])
        .output()
        .unwrap();
    let mut spec: serde_json::Value = serde_json::from_slice(&dump.stdout).unwrap();
    spec["solver"]["grid"] = serde_json::json!([16, 16]);
    spec["solver"]["cutoff"] = serde_json::json!(3);
    spec["solver"]["kPoints"] = serde_json::json!(3);
    spec["solver"]["nBands"] = serde_json::json!(2);
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();

    let out = Command::new(bin())
        .arg("bench")
        .arg(spec_path.to_str().unwrap())
        .args(["--repeat", "2", "--out"])
        .arg(dir.path().join("bench").to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for stage in ["beltrami", "bands", "pushforward"] {
        assert!(text.contains(stage), "missing {stage} in:\n{text}");
    }
}
