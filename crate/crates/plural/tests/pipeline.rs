use std::path::{Path, PathBuf};

use plural::config::{ExperimentConfig, Grid, Selection};
use plural::experiment::{best_sweep_row, build_sets, prepare, select_gcm_scale, MlpSweepRow};
use plural::{run_experiment, write_outputs, Error};
use plural_core::{gcm_optimize_scale, ExemplarMemory, GcmParams, Kernel};

fn toy_config() -> ExperimentConfig {
    let path = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/toy_experiment.toml"));
    let mut c = ExperimentConfig::load(path).unwrap();
    c.mlp.hidden = vec![10];
    c.mlp.seeds = vec![1, 2];
    c.mlp.max_epochs = 20;
    c
}

#[test]
fn parallel_scale_selection_agrees_with_core() {
    let c = toy_config();
    let data = prepare(&c).unwrap();
    let sets = build_sets(&c, &data.table, &data.nouns).unwrap();
    let memory = ExemplarMemory::new(sets.fit.vectors.clone(), sets.fit.labels.clone(), sets.classes.clone()).unwrap();
    let grid = Grid::new(0.2, 3.0, 0.05).values();
    for kernel in [Kernel::Gaussian, Kernel::Exponential] {
        let p = GcmParams::new(1.0, kernel);
        let ours = select_gcm_scale(&memory, &p, &sets.test.vectors, &sets.test.labels, &grid).unwrap();
        let core = gcm_optimize_scale(&memory, &p, &sets.test.vectors, &sets.test.labels, &grid).unwrap();
        assert_eq!(ours, core);
    }
}

#[test]
fn sets_share_one_label_space() {
    let c = toy_config();
    let data = prepare(&c).unwrap();
    let sets = build_sets(&c, &data.table, &data.nouns).unwrap();
    assert_eq!(sets.fit.len() + sets.test.len(), data.nouns.len());
    assert!(sets.fit_no_default.labels.iter().all(|&l| l != sets.default_class));
    assert_eq!(
        sets.fit_no_default.len(),
        sets.fit.labels.iter().filter(|&&l| l != sets.default_class).count()
    );
    assert_eq!(sets.select.ids, sets.test.ids);
}

#[test]
fn validation_selection_holds_out_part_of_training() {
    let mut c = toy_config();
    c.selection = Selection::Validation { fraction: 0.25, seed: 9 };
    let data = prepare(&c).unwrap();
    let sets = build_sets(&c, &data.table, &data.nouns).unwrap();
    assert_eq!(sets.fit.len() + sets.select.len() + sets.test.len(), data.nouns.len());
    assert!(sets.select.ids.iter().all(|id| !sets.test.ids.contains(id) || id.is_empty()));
    let (report, _) = run_experiment(&c).unwrap();
    assert_eq!(report.counts.selection, sets.select.len());
    assert!(report.to_json().unwrap().contains("\"on\": \"validation\""));
}

#[test]
fn sweep_rows_cover_the_grid_and_best_prefers_small_networks() {
    let c = toy_config();
    let (report, artifacts) = run_experiment(&c).unwrap();
    // One hidden size, four checkpoints, two seeds.
    assert_eq!(artifacts.mlp_sweep.len(), 4 * 2);
    let best = best_sweep_row(&artifacts.mlp_sweep).unwrap();
    let mlp = report.mlp.unwrap();
    assert_eq!((mlp.hidden, mlp.epochs, mlp.seed), (best.hidden, best.epochs, best.seed));
    assert!(artifacts.mlp_sweep.iter().all(|r| r.selection_accuracy <= best.selection_accuracy));

    let row = |hidden, epochs, seed, acc| MlpSweepRow {
        hidden,
        epochs,
        seed,
        selection_accuracy: acc,
        test_accuracy: acc,
    };
    let rows = [row(20, 5, 1, 0.5), row(10, 10, 2, 0.5), row(10, 10, 1, 0.5), row(10, 5, 1, 0.4)];
    assert_eq!(best_sweep_row(&rows), Some(row(10, 10, 1, 0.5)));
}

#[test]
fn report_lists_written_artifacts() {
    let c = toy_config();
    let (report, artifacts) = run_experiment(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written: Vec<PathBuf> = write_outputs(&report, &artifacts, dir.path()).unwrap();
    let nn = report.nn.as_ref().unwrap();
    for name in [
        nn.hybrid.curve_file.as_str(),
        report.gcm.as_ref().unwrap().hybrid.curve_file.as_str(),
        report.mlp.as_ref().unwrap().model_file.as_str(),
        report.mlp.as_ref().unwrap().sweep_file.as_str(),
    ] {
        assert!(written.contains(&dir.path().join(name)), "{name}");
    }
    let sweep = std::fs::read_to_string(dir.path().join("mlp_sweep.csv")).unwrap();
    assert!(sweep.starts_with("hidden,epochs,seed,test_accuracy\n"));
    let curve = std::fs::read_to_string(dir.path().join("nn_hybrid_curve.csv")).unwrap();
    assert!(curve.starts_with("t,accuracy\n0,"));
    assert_eq!(curve.lines().count(), 1 + 201);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("nn_hybrid_curve.json")).unwrap()).unwrap();
    assert_eq!(sidecar["baseline"].as_f64().unwrap(), nn.simple.accuracy);
    assert_eq!(sidecar["config"]["split"]["seed"], 1);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.contains("NN leave-one-out,") && summary.contains(",n/a"));
}

#[test]
fn disabled_classifiers_leave_gaps() {
    let mut c = toy_config();
    c.mlp.enabled = false;
    c.gcm.enabled = false;
    let (report, artifacts) = run_experiment(&c).unwrap();
    assert!(report.mlp.is_none() && artifacts.models.is_empty());
    let summary = plural::emit_summary(&report.summary).unwrap();
    assert!(summary.contains("GCM,n/a,n/a\n"));
    assert!(summary.contains("MLP,n/a,n/a\n"));
}

#[test]
fn hybrid_thresholds_respect_gate_bounds() {
    let c = toy_config();
    let (report, _) = run_experiment(&c).unwrap();
    let gcm = report.gcm.unwrap();
    assert!((0.0..=1.0).contains(&gcm.hybrid.threshold));
    let mlp = report.mlp.unwrap();
    assert!((0.0..=1.0).contains(&mlp.hybrid.threshold));
    assert!(mlp.hybrid.ungated_accuracy.is_some());
    assert!(report.nn.unwrap().hybrid.ungated_accuracy.is_none());
}

#[test]
fn stage_errors_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("lex.tsv");
    std::fs::write(&lexicon, "Frau\tf r aʊ\tf r aʊ ə n\nBad\tb a t\n").unwrap();
    let c = ExperimentConfig {
        lexicon,
        ..toy_config()
    };
    let err = run_experiment(&c).unwrap_err();
    assert!(matches!(err, Error::Stage { stage: "ingest", .. }), "{err}");
    assert!(err.to_string().starts_with("ingest: "));
    assert!(err.to_string().contains("lex.tsv:2:"));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn missing_inputs_are_config_errors() {
    let mut c = toy_config();
    c.features = Some(PathBuf::from("/no/such/features.tsv"));
    let err = run_experiment(&c).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("/no/such/features.tsv"));
}
