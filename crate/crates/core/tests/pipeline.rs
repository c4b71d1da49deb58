use std::fs;
use std::path::Path;

use stratix::analysis::ClusteringRequest;
use stratix::integrate::{Atom, SelectionSpec};
use stratix::metrics::adjusted_rand_index;
use stratix::pipeline::{run_pipeline, InputsConfig, ModalityConfig, PipelineConfig};
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

fn config(dir: &Path, out: &str, k_a: usize, k_b: usize) -> PipelineConfig {
    PipelineConfig {
        output_dir: dir.join(out),
        inputs: InputsConfig {
            matrix_a: dir.join("matrix_a.csv"),
            matrix_b: dir.join("matrix_b.csv"),
            clinical: dir.join("clinical.csv"),
            modality_a: "mrna".into(),
            modality_b: "mirna".into(),
            log_transform: false,
            zscore: false,
        },
        modality_a: ModalityConfig { features: None, clustering: ClusteringRequest::kmeans(k_a, 1) },
        modality_b: ModalityConfig { features: None, clustering: ClusteringRequest::kmeans(k_b, 2) },
        selections: vec![
            SelectionSpec::new("concordant", vec![Atom::Ribbon { a: 0, b: 0 }, Atom::Ribbon { a: 1, b: 1 }]),
            SelectionSpec::new("discordant", vec![Atom::Ribbon { a: 0, b: 1 }, Atom::Ribbon { a: 1, b: 0 }]),
        ],
    }
}

#[test]
fn planted_cohort_is_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(3)).unwrap();
    cohort.write_to(dir.path()).unwrap();
    let out = run_pipeline(&config(dir.path(), "out", 2, 2)).unwrap();
    assert!(adjusted_rand_index(&out.analysis_a.partition.labels, &cohort.planted_a) >= 0.9);
    assert!(adjusted_rand_index(&out.analysis_b.partition.labels, &cohort.planted_b) >= 0.9);
    let lr: serde_json::Value = serde_json::from_str(out.file("logrank.json").unwrap()).unwrap();
    assert!(lr["p_value"].as_f64().unwrap() < 1e-3);
    for name in ["partition_a.csv", "silhouette_b.json", "graph_a.json", "survival_curves.csv"] {
        assert!(dir.path().join("out").join(name).is_file(), "{name}");
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    generate_synthetic(&SyntheticCohortSpec::planted_2x2(8)).unwrap().write_to(dir.path()).unwrap();
    let first = run_pipeline(&config(dir.path(), "one", 2, 2)).unwrap();
    run_pipeline(&config(dir.path(), "two", 2, 2)).unwrap();
    for (name, _) in &first.files {
        let a = fs::read(dir.path().join("one").join(name)).unwrap();
        let b = fs::read(dir.path().join("two").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn four_by_three_shape() {
    let dir = tempfile::tempdir().unwrap();
    generate_synthetic(&SyntheticCohortSpec::planted_2x2(5)).unwrap().write_to(dir.path()).unwrap();
    let mut cfg = config(dir.path(), "out", 4, 3);
    cfg.selections.clear();
    let out = run_pipeline(&cfg).unwrap();
    let model: serde_json::Value = serde_json::from_str(out.file("parallel_sets.json").unwrap()).unwrap();
    assert_eq!(model["blocks_a"].as_array().unwrap().len(), 4);
    assert_eq!(model["blocks_b"].as_array().unwrap().len(), 3);
    let total: u64 = model["ribbons"].as_array().unwrap().iter().map(|r| r["size"].as_u64().unwrap()).sum();
    assert_eq!(total, 100);
    assert!(out.file("logrank.json").is_none());
}

#[test]
fn failed_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    generate_synthetic(&SyntheticCohortSpec::planted_2x2(1)).unwrap().write_to(dir.path()).unwrap();
    let mut cfg = config(dir.path(), "out", 2, 2);
    cfg.selections.push(SelectionSpec::new("overlap", vec![Atom::Ribbon { a: 0, b: 0 }]));
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.code(), "overlapping_groups");
    assert!(!dir.path().join("out").exists());
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().filter_map(|e| e.ok()).filter(|e| e.file_name().to_string_lossy().contains("partial")).collect();
    assert!(leftovers.is_empty());
}
