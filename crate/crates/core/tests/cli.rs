use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lab(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lab"));
    cmd.args(args).env_remove("LAB_SEED");
    if let Some(s) = seed {
        cmd.env("LAB_SEED", s);
    }
    cmd.output().expect("lab runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn list_names_every_experiment() {
    let out = lab(&["list"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for id in [
        "E1_selfadjoint_cg",
        "E2_shift_loss_gain",
        "E3_normal_equations",
        "E4_prototype_friedrichs",
        "E5_compact_normal",
        "E6_perturbation_limits",
    ] {
        assert!(text.contains(id), "{id} missing from list");
    }
    assert!(text.contains("shift") && text.contains("prototype"));
}

#[test]
fn run_writes_report_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["run", "--config", &config("e1_random_spd.json"), "--out", dir.path().to_str().unwrap(), "--svg"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(dir.path());
    assert_eq!(rep["outcome"], "success");
    assert_eq!(rep["schema_version"], "1.0.0");
    let csvs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(!csvs.is_empty());
    let head = std::fs::read_to_string(&csvs[0]).unwrap();
    assert!(head.starts_with("n,residual,distance,approximant_norm\n"));
    assert!(csvs.iter().all(|p| p.with_extension("svg").exists()));
    assert!(!dir.path().read_dir().unwrap().any(|e| e.unwrap().file_name().to_string_lossy().contains(".tmp")));
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"experiment_id": "E1_selfadjoint_cg",
            "operator_spec": {"kind": "diagonal", "entries": [1.0]},
            "datum_spec": {"kind": "ones"},
            "window": {"n_max": 1}, "seed": 1, "colour": "blue"}"#,
    );
    let out = lab(&["run", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let missing_seed = write_config(
        dir.path(),
        "noseed.json",
        r#"{"experiment_id": "E1_selfadjoint_cg",
            "operator_spec": {"kind": "diagonal", "entries": [1.0]},
            "datum_spec": {"kind": "ones"},
            "window": {"n_max": 1}}"#,
    );
    let out = lab(&["run", "--config", missing_seed.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unmet_asserted_convergence_exits_3() {
    // one CG step cannot reach the solution for four distinct eigenvalues
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "short.json",
        r#"{"experiment_id": "E1_selfadjoint_cg",
            "operator_spec": {"kind": "diagonal", "entries": [1.0, 2.0, 3.0, 4.0]},
            "datum_spec": {"kind": "ones"},
            "window": {"n_max": 1}, "seed": 1}"#,
    );
    let out = lab(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(dir.path())["outcome"], "non_convergence");
}

#[test]
fn lab_seed_overrides_the_config_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = config("e1_random_spd.json");
    assert_eq!(lab(&["run", "--config", &cfg, "--out", a.path().to_str().unwrap()], None).status.code(), Some(0));
    assert_eq!(lab(&["run", "--config", &cfg, "--out", b.path().to_str().unwrap()], Some("987")).status.code(), Some(0));
    let (ra, rb) = (report(a.path()), report(b.path()));
    assert_eq!(rb["config"]["seed"], 987);
    assert_ne!(ra["config"]["seed"], 987);
    assert_ne!(ra["checks"], rb["checks"]);

    let out = lab(&["run", "--config", &cfg, "--out", b.path().to_str().unwrap()], Some("not-a-number"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diagnose_prints_a_report() {
    let out = lab(
        &[
            "diagnose",
            "--operator",
            &config("specs/shift_op.json"),
            "--datum",
            &config("specs/e0.json"),
            "--n",
            "8",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_used"], 8);
    assert!(v["verdict"]["verdict"].is_string());
    assert_eq!(v["verdict"]["guard"]["applicable"], true);
}

#[test]
fn diagnose_rejects_a_bad_spec() {
    let dir = tempfile::tempdir().unwrap();
    let op = write_config(dir.path(), "op.json", r#"{"kind": "tensor"}"#);
    let out = lab(&["diagnose", "--operator", op.to_str().unwrap(), "--datum", &config("specs/e0.json"), "--n", "4"], None);
    assert_eq!(out.status.code(), Some(2));
}
