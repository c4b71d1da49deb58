//! Sample-similarity matrices and their threshold-sparsified population graphs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cluster::Partition;
use crate::error::{Error, Result};
use crate::features::FeatureView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Pearson,
    #[default]
    Euclidean,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Pearson => "pearson",
            Metric::Euclidean => "euclidean",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" => Ok(Metric::Pearson),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(Error::Domain(format!("unknown metric `{other}`"))),
        }
    }
}

/// Symmetric n × n similarity matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub sample_ids: Vec<String>,
    pub metric: Metric,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Wraps a precomputed row-major matrix. Symmetry and the unit diagonal
    /// are enforced: the upper triangle is mirrored and the diagonal set to 1.
    pub fn from_values(sample_ids: Vec<String>, metric: Metric, mut values: Vec<f64>) -> Self {
        let n = sample_ids.len();
        assert_eq!(values.len(), n * n, "matrix must be n x n");
        for i in 0..n {
            values[i * n + i] = 1.0;
            for j in i + 1..n {
                values[j * n + i] = values[i * n + j];
            }
        }
        Self {
            sample_ids,
            metric,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn similarity_matrix(view: &FeatureView, metric: Metric) -> Result<SimilarityMatrix> {
    let n = view.n_samples();
    if n < 2 {
        return Err(Error::CohortTooSmall(n));
    }
    let mut values = vec![0.0; n * n];
    match metric {
        Metric::Euclidean => {
            for i in 0..n {
                for j in i + 1..n {
                    values[i * n + j] = 1.0 / (1.0 + euclidean(view.point(i), view.point(j)));
                }
            }
        }
        Metric::Pearson => {
            // centre and scale each sample once; correlation is then a dot product
            let mut unit = Vec::with_capacity(n);
            for (s, p) in view.points().iter().enumerate() {
                let mean = p.iter().sum::<f64>() / p.len() as f64;
                let centred: Vec<f64> = p.iter().map(|v| v - mean).collect();
                let norm = centred.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 || p.iter().all(|&v| v == p[0]) {
                    return Err(Error::ZeroVarianceSample(view.sample_ids[s].clone()));
                }
                unit.push(centred.into_iter().map(|v| v / norm).collect::<Vec<f64>>());
            }
            for i in 0..n {
                for j in i + 1..n {
                    let r: f64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum();
                    values[i * n + j] = r.clamp(-1.0, 1.0);
                }
            }
        }
    }
    Ok(SimilarityMatrix::from_values(
        view.sample_ids.clone(),
        metric,
        values,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Population graph: every sample is a vertex, edges are the similarities
/// strictly above the threshold, sorted by `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityGraph {
    pub sample_ids: Vec<String>,
    pub edges: Vec<Edge>,
    pub threshold: f64,
    pub metric: Metric,
}

impl SimilarityGraph {
    /// Builds a graph from explicit weighted edges. Self-loops are rejected,
    /// pairs are normalised to `i < j` and duplicate pairs are summed.
    pub fn from_edges(
        sample_ids: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = sample_ids.len();
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, w) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::Domain(format!("invalid edge ({a}, {b})")));
            }
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
        Ok(Self {
            sample_ids,
            edges: merged
                .into_iter()
                .map(|((i, j), weight)| Edge { i, j, weight })
                .collect(),
            threshold: f64::NEG_INFINITY,
            metric: Metric::Euclidean,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.sample_ids.len()
    }

    /// Adjacency lists `(neighbour, weight)` per vertex.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for e in &self.edges {
            adj[e.i].push((e.j, e.weight));
            adj[e.j].push((e.i, e.weight));
        }
        adj
    }

    /// Graph export consumed by the force-directed layout:
    /// `{nodes: [{id, cluster}], links: [{source, target, weight}]}`.
    pub fn to_json(&self, partition: Option<&Partition>) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .sample_ids
            .iter()
            .enumerate()
            .map(|(i, id)| {
                serde_json::json!({
                    "id": id,
                    "cluster": partition.map(|p| p.labels[i]),
                })
            })
            .collect();
        let links: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "source": self.sample_ids[e.i],
                    "target": self.sample_ids[e.j],
                    "weight": e.weight,
                })
            })
            .collect();
        serde_json::json!({
            "metric": self.metric,
            "threshold": self.threshold,
            "nodes": nodes,
            "links": links,
        })
    }
}

pub fn sparsify(m: &SimilarityMatrix, threshold: f64) -> SimilarityGraph {
    let n = m.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = m.get(i, j);
            if w > threshold {
                edges.push(Edge { i, j, weight: w });
            }
        }
    }
    SimilarityGraph {
        sample_ids: m.sample_ids.clone(),
        edges,
        threshold,
        metric: m.metric,
    }
}

/// Median of the off-diagonal similarities, used when no threshold is given.
pub fn median_similarity(m: &SimilarityMatrix) -> f64 {
    let n = m.n();
    let mut v: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j))
        .collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    /// degree -> number of vertices with that degree
    pub degree_histogram: BTreeMap<usize, usize>,
}

/// Union-find with path halving and union by size.
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Component index per vertex, numbered by first appearance.
pub fn connected_components(g: &SimilarityGraph) -> Vec<usize> {
    let n = g.n_vertices();
    let mut ds = DisjointSets::new(n);
    for e in &g.edges {
        ds.union(e.i, e.j);
    }
    let mut ids = vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(n);
    let mut next = 0;
    for v in 0..n {
        let r = ds.find(v);
        if ids[r] == usize::MAX {
            ids[r] = next;
            next += 1;
        }
        labels.push(ids[r]);
    }
    labels
}

pub fn graph_summary(g: &SimilarityGraph) -> GraphSummary {
    let n = g.n_vertices();
    let mut degree = vec![0usize; n];
    for e in &g.edges {
        degree[e.i] += 1;
        degree[e.j] += 1;
    }
    let mut degree_histogram = BTreeMap::new();
    for d in degree {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    let components = connected_components(g).into_iter().max().map_or(0, |m| m + 1);
    GraphSummary {
        vertices: n,
        edges: g.edges.len(),
        components,
        degree_histogram,
    }
}
