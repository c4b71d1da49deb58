//! Per-modality stratification (k-means, spectral, community detection) and
//! the views that score and arrange a partition (silhouette, heatmap order).

mod community;
mod heatmap;
mod kmeans;
mod silhouette;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use community::{community_detect, modularity};
pub use heatmap::{heatmap_order, HeatmapBlock, HeatmapLayout};
pub use kmeans::{kmeans, kmeans_with, KMeansOptions};
pub use silhouette::{silhouette, SilhouetteReport};
pub use spectral::{spectral, spectral_graph};

use crate::error::{Error, Result};
use crate::graph::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kmeans,
    Spectral,
    Community,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Kmeans => "kmeans",
            Method::Spectral => "spectral",
            Method::Community => "community",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kmeans" | "k-means" => Ok(Method::Kmeans),
            "spectral" => Ok(Method::Spectral),
            "community" => Ok(Method::Community),
            other => Err(Error::Domain(format!("unknown clustering method `{other}`"))),
        }
    }
}

/// Parameters a partition was produced with. `k` is absent for community
/// detection, where the cluster count is emergent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ClusterParams {
    pub k: Option<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// Assignment of every sample of one modality to exactly one cluster.
///
/// Labels are canonical: cluster indices are numbered in order of first
/// appearance along `sample_ids`, so the first sample is always in cluster 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub modality_name: String,
    pub sample_ids: Vec<String>,
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: Method,
    pub params: ClusterParams,
    pub wcss: Option<f64>,
    pub modularity: Option<f64>,
}

impl Partition {
    /// Validates and canonicalises an arbitrary labelling.
    pub fn from_labels(
        modality_name: impl Into<String>,
        sample_ids: Vec<String>,
        labels: &[usize],
        method: Method,
        params: ClusterParams,
    ) -> Result<Self> {
        if labels.len() != sample_ids.len() || labels.is_empty() {
            return Err(Error::SampleMismatch);
        }
        let (labels, k) = canonical_labels(labels);
        Ok(Self {
            modality_name: modality_name.into(),
            sample_ids,
            labels,
            k,
            method,
            params,
            wcss: None,
            modularity: None,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Sample indices of each cluster, in sample order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            m[l].push(i);
        }
        m
    }

    /// `sample_id,label` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_id,label\n");
        for (id, l) in self.sample_ids.iter().zip(&self.labels) {
            out.push_str(&format!("{id},{l}\n"));
        }
        out
    }

    /// Sidecar describing how the labels were produced.
    pub fn sidecar_json(&self) -> serde_json::Value {
        serde_json::json!({
            "modality": self.modality_name,
            "method": self.method,
            "params": self.params,
            "seed": self.params.seed,
            "k": self.k,
            "wcss": self.wcss,
            "modularity": self.modularity,
            "cluster_sizes": self.cluster_sizes(),
        })
    }
}

/// Renumbers labels by first appearance; returns the labels and the count.
pub(crate) fn canonical_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let out = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (out, map.len())
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
