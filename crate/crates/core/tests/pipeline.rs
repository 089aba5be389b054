use std::sync::Arc;

use ned_core::harness::{emit_csv, exact_error_oracle, read_csv, run_experiment, run_model, ExperimentConfig, Family};
use ned_core::{Alphabet, ClassifierKind, ClassifierSpec, LabelSet, SourceModel};

fn small_model() -> SourceModel {
    let cond = vec![
        vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.2, 0.6]],
        vec![vec![0.1, 0.8, 0.1], vec![0.3, 0.3, 0.4]],
    ];
    SourceModel::from_nested(
        Arc::new(Alphabet::new(vec![-1, 0, 7]).unwrap()),
        Arc::new(LabelSet::new(vec!["left".into(), "right".into()]).unwrap()),
        &cond,
    )
    .unwrap()
}

#[test]
fn saved_model_drives_a_reproducible_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("model.json");
    small_model().save(&model_path).unwrap();
    assert_eq!(SourceModel::load(&model_path).unwrap().to_doc(), small_model().to_doc());

    let cfg = ExperimentConfig {
        family: Family::FromFile,
        model_path: Some(model_path),
        n_grid: vec![],
        t: 2,
        reps: 50,
        tests_per_label: 40,
        seed: 11,
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg).unwrap();
    let csv_path = dir.path().join("out.csv");
    emit_csv(&rows, &csv_path).unwrap();
    assert_eq!(read_csv(&csv_path).unwrap(), rows);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.n == 2 && r.t == 2));
}

#[test]
fn monte_carlo_agrees_with_oracle_for_two_training_vectors() {
    let model = small_model();
    for kind in ClassifierKind::ALL {
        let spec = ClassifierSpec::new(kind).with_k(3);
        let exact = exact_error_oracle(&model, 2, &spec).unwrap();
        let cfg = ExperimentConfig {
            t: 2,
            knn_k: 3,
            classifiers: vec![kind],
            reps: 40_000,
            tests_per_label: 2,
            seed: 21,
            ..ExperimentConfig::default()
        };
        let row = &run_model(&model, &cfg).unwrap()[0];
        assert!(
            (row.error_estimate - exact).abs() < 4.0 * row.stderr,
            "{kind}: mc {} exact {exact} se {}",
            row.error_estimate,
            row.stderr
        );
    }
}
