use std::path::Path;

use krylov_lab::experiments::{
    non_finite_fields, run_experiment, write_outputs, ExperimentConfig, ExperimentId, ExperimentReport, Outcome,
    PropositionOutcome,
};

fn configs() -> Vec<(String, ExperimentConfig)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), ExperimentConfig::from_file(&p).unwrap()))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn shipped_configs_succeed_with_finite_round_tripping_reports() {
    let all = configs();
    let ids: std::collections::HashSet<_> = all.iter().map(|(_, c)| c.experiment_id).collect();
    assert_eq!(ids.len(), ExperimentId::ALL.len(), "every experiment has a config");
    for (name, cfg) in &all {
        let report = run_experiment(cfg).unwrap();
        assert_eq!(report.outcome, Outcome::Success, "{name}: {:?}", report.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert!(non_finite_fields(&report).is_empty(), "{name}: {:?}", non_finite_fields(&report));
        let text = report.to_json().unwrap();
        assert_eq!(ExperimentReport::from_json(&text).unwrap(), report, "{name}");
        assert!(report.verdicts.iter().all(|v| v.verdict.tolerances.distance_tol > 0.0));
    }
}

#[test]
fn shift_counterexample_fails_the_hypothesis() {
    let text = include_str!("../configs/e6_shift_counter.json");
    let report = run_experiment(&ExperimentConfig::from_json(text).unwrap()).unwrap();
    assert_eq!(report.proposition, Some(PropositionOutcome::HypothesisFailed));
    assert!(report.guard.passed);
}

#[test]
fn invertible_limit_confirms_the_proposition() {
    let text = include_str!("../configs/e6_add_image.json");
    let report = run_experiment(&ExperimentConfig::from_json(text).unwrap()).unwrap();
    assert_eq!(report.proposition, Some(PropositionOutcome::Confirmed));
}

#[test]
fn outputs_are_written_atomically_into_place() {
    let text = include_str!("../configs/e5_compact.json");
    let report = run_experiment(&ExperimentConfig::from_json(text).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = write_outputs(&report, dir.path(), true).unwrap();
    assert!(written.iter().all(|p| p.exists()));
    let back = ExperimentReport::from_json(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(back, report);
}
