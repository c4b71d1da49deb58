mod common;

use common::*;
use proptest::prelude::*;
use stratix::cluster::{ClusterParams, Method, Partition};
use stratix::features::{select_features, FeatureView};
use stratix::graph::{connected_components, similarity_matrix, sparsify, Metric, SimilarityMatrix};
use stratix::ingest::{parse_clinical_table, parse_expression_matrix, ExpressionMatrix};
use stratix::integrate::{build_parallel_sets, cross_tab, resolve_indices, Atom, Side};

fn matrix(rows: Vec<Vec<f64>>) -> ExpressionMatrix {
    let feats = (0..rows.len()).map(|f| format!("g{f}")).collect();
    let samples = (0..rows[0].len()).map(|s| format!("p{s}")).collect();
    ExpressionMatrix::from_rows("mrna", feats, samples, rows).unwrap()
}

fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..6, 2usize..12).prop_flat_map(|(f, s)| {
        prop::collection::vec(prop::collection::vec(-1e3f64..1e3, s), f)
    })
}

fn part(name: &str, labels: &[usize]) -> Partition {
    let ids = (0..labels.len()).map(|i| format!("p{i}")).collect();
    Partition::from_labels(name, ids, labels, Method::Kmeans, ClusterParams::default()).unwrap()
}

fn two_partitions() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(0usize..5, n),
            prop::collection::vec(0usize..4, n),
        )
    })
}

proptest! {
    #[test]
    fn matrix_csv_roundtrips(rows in rows_strategy()) {
        let m = matrix(rows);
        let back = parse_expression_matrix(&m.to_csv(), "mrna").unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn zscore_rows_have_zero_mean_unit_sd(rows in rows_strategy()) {
        let m = matrix(rows).normalize(false, true).unwrap();
        let n = m.n_samples() as f64;
        for f in 0..m.n_features() {
            let row = m.row(f);
            let mean = row.iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            if row.iter().any(|&v| v != 0.0) {
                let sd = (row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
                prop_assert!((sd - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn clinical_csv_roundtrips(obs in prop::collection::vec((0u32..5000, any::<bool>(), prop::option::of(20u8..90), prop::option::of(1u8..4)), 1..20)) {
        let text = std::iter::once("sample_id,age,tumor_grade,survival_time,survival_status".to_string())
            .chain(obs.iter().enumerate().map(|(i, (t, e, age, grade))| {
                let opt = |v: &Option<u8>| v.map_or("NA".to_string(), |x| x.to_string());
                format!("s{i},{},{},{},{}", opt(age), opt(grade), t, u8::from(*e))
            }))
            .collect::<Vec<_>>()
            .join("\n");
        let table = parse_clinical_table(&text).unwrap();
        prop_assert_eq!(parse_clinical_table(&table.to_csv()).unwrap(), table);
    }

    #[test]
    fn feature_selection_keeps_requested_order(rows in rows_strategy(), picks in prop::collection::vec(0usize..8, 1..6)) {
        let m = matrix(rows);
        let requested: Vec<String> = picks.iter().map(|i| format!("g{i}")).collect();
        match select_features(&m, &requested) {
            Ok((sel, view)) => {
                prop_assert_eq!(view.n_features(), sel.matched.len());
                for (k, id) in sel.matched.iter().enumerate() {
                    let f = m.feature_index(id).unwrap();
                    for s in 0..m.n_samples() {
                        prop_assert_eq!(view.value(k, s), m.get(f, s));
                    }
                }
                let unmatched_ok = sel.unmatched.iter().all(|id| m.feature_index(id).is_none());
                prop_assert!(unmatched_ok);
            }
            Err(e) => {
                prop_assert_eq!(e.code(), "no_features_matched");
                prop_assert!(requested.iter().all(|id| m.feature_index(id).is_none()));
            }
        }
    }

    #[test]
    fn raising_the_threshold_only_removes_edges(
        values in prop::collection::vec(-1.0f64..1.0, 36),
        t1 in -1.0f64..1.0,
        dt in 0.0f64..1.0,
    ) {
        let ids: Vec<String> = (0..6).map(|i| format!("v{i}")).collect();
        let m = SimilarityMatrix::from_values(ids, Metric::Pearson, values);
        let low = sparsify(&m, t1);
        let high = sparsify(&m, t1 + dt);
        prop_assert!(high.edges.iter().all(|e| low.edges.contains(e)));
        prop_assert!(high.edges.iter().all(|e| e.weight > t1 + dt));
        let pairs: Vec<(usize, usize)> = low.edges.iter().map(|e| (e.i, e.j)).collect();
        prop_assert!(same_partition(&connected_components(&low), &bfs_components(6, &pairs)));
    }

    #[test]
    fn pearson_ignores_affine_maps_of_samples(
        points in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 5), 3..8),
        scale in 0.1f64..10.0,
        shift in -50.0f64..50.0,
    ) {
        let view = FeatureView::from_anonymous_points(points.clone());
        let Ok(base) = similarity_matrix(&view, Metric::Pearson) else { return Ok(()) };
        let mapped: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|v| scale * v + shift).collect()).collect();
        let other = similarity_matrix(&FeatureView::from_anonymous_points(mapped), Metric::Pearson).unwrap();
        for i in 0..base.n() {
            for j in 0..base.n() {
                prop_assert!((base.get(i, j) - other.get(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cross_tab_matches_nested_loops((la, lb) in two_partitions()) {
        let (pa, pb) = (part("a", &la), part("b", &lb));
        let t = cross_tab(&pa, &pb).unwrap();
        for a in 0..pa.k {
            for b in 0..pb.k {
                let count = (0..la.len()).filter(|&i| pa.labels[i] == a && pb.labels[i] == b).count();
                prop_assert_eq!(t.counts[a][b], count);
            }
        }
        prop_assert_eq!(t.row_sums(), pa.cluster_sizes());
        prop_assert_eq!(t.col_sums(), pb.cluster_sizes());
        let model = build_parallel_sets(&t);
        prop_assert_eq!(model.blocks_a.len(), pa.k);
        prop_assert_eq!(model.blocks_b.len(), pb.k);
        prop_assert_eq!(model.ribbons.iter().map(|r| r.size).sum::<usize>(), la.len());
    }

    #[test]
    fn selections_are_monotone_and_idempotent(
        (la, lb) in two_partitions(),
        picks in prop::collection::vec((0usize..3, 0usize..5, 0usize..4), 1..5),
    ) {
        let t = cross_tab(&part("a", &la), &part("b", &lb)).unwrap();
        let atoms: Vec<Atom> = picks
            .iter()
            .map(|&(kind, x, y)| match kind {
                0 => Atom::Block { modality: Side::A, cluster: x % t.k_a },
                1 => Atom::Block { modality: Side::B, cluster: y % t.k_b },
                _ => Atom::Ribbon { a: x % t.k_a, b: y % t.k_b },
            })
            .collect();
        let all = resolve_indices(&atoms, &t).unwrap();
        let twice: Vec<Atom> = atoms.iter().chain(&atoms).copied().collect();
        prop_assert_eq!(&resolve_indices(&twice, &t).unwrap(), &all);
        for k in 1..atoms.len() {
            let prefix = resolve_indices(&atoms[..k], &t).unwrap();
            prop_assert!(prefix.iter().all(|i| all.contains(i)));
        }
    }
}
