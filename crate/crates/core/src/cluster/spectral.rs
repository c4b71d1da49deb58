use nalgebra::DMatrix;

use super::kmeans::{fit_points, KMeansOptions};
use super::{ClusterParams, Method, Partition};
use crate::error::{Error, Result};
use crate::features::FeatureView;
use crate::graph::{median_similarity, similarity_matrix, sparsify, Metric, SimilarityGraph};

const DEGREE_GUARD: f64 = 1e-12;

/// Spectral clustering of the samples of `view`.
///
/// The affinity is the population graph at `threshold` (the median
/// off-diagonal similarity when absent); only positive similarities strictly
/// above the threshold connect samples.
pub fn spectral(
    view: &FeatureView,
    k: usize,
    metric: Metric,
    threshold: Option<f64>,
    seed: u64,
) -> Result<Partition> {
    let n = view.n_samples();
    if k < 2 || k > n {
        return Err(Error::KOutOfRange { k, n, min: 2 });
    }
    let sim = similarity_matrix(view, metric)?;
    let threshold = threshold.unwrap_or_else(|| median_similarity(&sim));
    let graph = sparsify(&sim, threshold);
    let mut p = spectral_graph(&graph, k, seed)?;
    p.modality_name = view.modality_name.clone();
    Ok(p)
}

/// Spectral clustering on an explicit weighted graph.
pub fn spectral_graph(graph: &SimilarityGraph, k: usize, seed: u64) -> Result<Partition> {
    let n = graph.n_vertices();
    if k < 2 || k > n {
        return Err(Error::KOutOfRange { k, n, min: 2 });
    }
    let embedding = embed(graph, k)?;
    let fit = fit_points(&embedding, &KMeansOptions::new(k, seed))?;
    let mut p = Partition::from_labels(
        "graph",
        graph.sample_ids.clone(),
        &fit.labels,
        Method::Spectral,
        ClusterParams {
            k: Some(k),
            seed,
            metric: Some(graph.metric),
            threshold: Some(graph.threshold),
        },
    )?;
    p.wcss = Some(fit.wcss);
    Ok(p)
}

/// Row-normalised eigenvectors of the `k` smallest eigenvalues of the
/// symmetric normalised Laplacian `D^-1/2 (D - W) D^-1/2`.
fn embed(graph: &SimilarityGraph, k: usize) -> Result<Vec<Vec<f64>>> {
    let n = graph.n_vertices();
    let mut w = DMatrix::<f64>::zeros(n, n);
    for e in graph.edges.iter().filter(|e| e.weight > 0.0) {
        w[(e.i, e.j)] += e.weight;
        w[(e.j, e.i)] += e.weight;
    }
    let degree: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let inv_sqrt: Vec<f64> = degree
        .iter()
        .map(|&d| 1.0 / d.max(DEGREE_GUARD).sqrt())
        .collect();
    // isolated vertices get an all-zero Laplacian row, so each one spans
    // its own zero-eigenvalue direction like any other component
    let lap = DMatrix::from_fn(n, n, |i, j| {
        let dw = if i == j { degree[i] - w[(i, j)] } else { -w[(i, j)] };
        dw * inv_sqrt[i] * inv_sqrt[j]
    });
    let eig = lap
        .try_symmetric_eigen(f64::EPSILON, 100_000)
        .ok_or(Error::EigenNonConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let mut rows = vec![vec![0.0; k]; n];
    for (c, &idx) in order.iter().take(k).enumerate() {
        let v = eig.eigenvectors.column(idx);
        for (i, row) in rows.iter_mut().enumerate() {
            row[c] = v[i];
        }
    }
    for row in rows.iter_mut() {
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    Ok(rows)
}
