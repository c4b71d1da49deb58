//! Composition of the per-modality and integrative steps, plus the JSON/CSV
//! payloads every front end serves. The batch pipeline and the HTTP service
//! both go through these functions, so their outputs agree byte for byte.

use serde::{Deserialize, Serialize};

use crate::cluster::{
    community_detect, heatmap_order, kmeans, silhouette, spectral_graph, HeatmapLayout, Method,
    Partition, SilhouetteReport,
};
use crate::error::{Error, Result};
use crate::features::{select_features, FeatureSelection, FeatureView};
use crate::graph::{median_similarity, similarity_matrix, sparsify, Metric, SimilarityGraph};
use crate::ingest::{Cohort, ExpressionMatrix};
use crate::integrate::{cluster_color, Comparison, ParallelSetsModel, Side};

/// What the analyst asks for when clustering one modality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringRequest {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    /// Graph threshold; the median off-diagonal similarity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl ClusteringRequest {
    pub fn kmeans(k: usize, seed: u64) -> Self {
        Self {
            method: Method::Kmeans,
            k: Some(k),
            seed,
            metric: None,
            threshold: None,
        }
    }
}

/// Everything computed for one modality after clustering.
#[derive(Debug, Clone)]
pub struct ModalityAnalysis {
    pub view: FeatureView,
    pub partition: Partition,
    pub graph: SimilarityGraph,
    /// Absent when the partition has a single cluster.
    pub silhouette: Option<SilhouetteReport>,
    pub heatmap: HeatmapLayout,
}

/// Feature selection for one modality; `None` selects every feature.
pub fn select_modality(
    matrix: &ExpressionMatrix,
    features: Option<&[String]>,
) -> Result<(FeatureSelection, FeatureView)> {
    match features {
        Some(list) => select_features(matrix, list),
        None => select_features(matrix, &matrix.feature_ids),
    }
}

/// Clusters one feature view and derives the population graph, silhouette
/// and heatmap arrangement. Spectral and community detection run on the
/// same thresholded graph that is displayed.
pub fn analyze_modality(view: &FeatureView, request: &ClusteringRequest) -> Result<ModalityAnalysis> {
    let metric = request.metric.unwrap_or_default();
    let sim = similarity_matrix(view, metric)?;
    let threshold = request.threshold.unwrap_or_else(|| median_similarity(&sim));
    let graph = sparsify(&sim, threshold);
    let need_k = || {
        request
            .k
            .ok_or_else(|| Error::Domain(format!("method {} requires k", request.method)))
    };
    let mut partition = match request.method {
        Method::Kmeans => kmeans(view, need_k()?, request.seed)?,
        Method::Spectral => spectral_graph(&graph, need_k()?, request.seed)?,
        Method::Community => community_detect(&graph, request.seed)?,
    };
    partition.modality_name = view.modality_name.clone();
    if request.method != Method::Kmeans {
        partition.params.metric = Some(metric);
        partition.params.threshold = Some(threshold);
    }
    let silhouette = if partition.k >= 2 {
        Some(silhouette(view, &partition)?)
    } else {
        None
    };
    let heatmap = heatmap_order(view, &partition)?;
    Ok(ModalityAnalysis {
        view: view.clone(),
        partition,
        graph,
        silhouette,
        heatmap,
    })
}

/// Normalizes both matrices of a cohort.
pub fn normalize_cohort(cohort: &Cohort, log_transform: bool, zscore: bool) -> Result<Cohort> {
    Ok(Cohort {
        matrix_a: cohort.matrix_a.normalize(log_transform, zscore)?,
        matrix_b: cohort.matrix_b.normalize(log_transform, zscore)?,
        ..cohort.clone()
    })
}

/// Pretty JSON with a trailing newline; field order follows declaration.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable payload");
    s.push('\n');
    s
}

pub fn cohort_summary(cohort: &Cohort) -> serde_json::Value {
    serde_json::json!({
        "samples": cohort.n_samples(),
        "features_a": cohort.matrix_a.n_features(),
        "features_b": cohort.matrix_b.n_features(),
        "modality_a": cohort.matrix_a.modality_name,
        "modality_b": cohort.matrix_b.modality_name,
        "dropped": cohort.report,
    })
}

pub fn heatmap_payload(a: &ModalityAnalysis, side: Side) -> String {
    let mut v = a.heatmap.to_json(&a.view);
    v["colors"] = (0..a.partition.k)
        .map(|c| cluster_color(side, c))
        .collect::<Vec<_>>()
        .into();
    to_json_string(&v)
}

pub fn silhouette_payload(a: &ModalityAnalysis) -> Result<String> {
    let report = a
        .silhouette
        .as_ref()
        .ok_or(Error::TooFewClusters(a.partition.k))?;
    Ok(to_json_string(&report.to_json()))
}

pub fn graph_payload(a: &ModalityAnalysis, side: Side) -> String {
    let mut v = a.graph.to_json(Some(&a.partition));
    v["colors"] = (0..a.partition.k)
        .map(|c| cluster_color(side, c))
        .collect::<Vec<_>>()
        .into();
    to_json_string(&v)
}

/// `source,target,weight` rows.
pub fn graph_csv(g: &SimilarityGraph) -> String {
    let mut out = String::from("source,target,weight\n");
    for e in &g.edges {
        out.push_str(&format!("{},{},{}\n", g.sample_ids[e.i], g.sample_ids[e.j], e.weight));
    }
    out
}

pub fn parallel_sets_payload(m: &ParallelSetsModel) -> String {
    to_json_string(m)
}

/// `a,b,size` rows for the ribbons.
pub fn parallel_sets_csv(m: &ParallelSetsModel) -> String {
    let mut out = String::from("a,b,size\n");
    for r in &m.ribbons {
        out.push_str(&format!("{},{},{}\n", r.a, r.b, r.size));
    }
    out
}

pub fn comparison_payload(c: &Comparison) -> String {
    to_json_string(c)
}

/// `group,time,n_at_risk,events,survival,variance` rows for all curves.
pub fn survival_curves_csv(c: &Comparison) -> String {
    let mut out = String::from("group,time,n_at_risk,events,survival,variance\n");
    for curve in &c.curves {
        for line in curve.to_csv().lines().skip(1) {
            out.push_str(&curve.label);
            out.push(',');
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

/// `group,time` rows, one per censored patient.
pub fn censoring_csv(c: &Comparison) -> String {
    let mut out = String::from("group,time\n");
    for curve in &c.curves {
        for t in &curve.censor_times {
            out.push_str(&format!("{},{}\n", curve.label, t));
        }
    }
    out
}
