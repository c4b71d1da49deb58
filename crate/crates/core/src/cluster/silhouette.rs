use serde::{Deserialize, Serialize};

use super::{sq_dist, Partition};
use crate::error::{Error, Result};
use crate::features::FeatureView;

/// Per-sample silhouette widths with the per-cluster arrangement used by
/// the silhouette bar chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteReport {
    pub sample_ids: Vec<String>,
    pub labels: Vec<usize>,
    pub values: Vec<f64>,
    /// Sample indices per cluster, by descending silhouette (ties by index).
    pub cluster_order: Vec<Vec<usize>>,
    pub cluster_means: Vec<f64>,
    pub global_mean: f64,
}

impl SilhouetteReport {
    /// `sample_id,cluster,silhouette` rows in plot order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_id,cluster,silhouette\n");
        for (c, members) in self.cluster_order.iter().enumerate() {
            for &i in members {
                out.push_str(&format!("{},{},{}\n", self.sample_ids[i], c, self.values[i]));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let clusters: Vec<serde_json::Value> = self
            .cluster_order
            .iter()
            .enumerate()
            .map(|(c, members)| {
                serde_json::json!({
                    "cluster": c,
                    "mean": self.cluster_means[c],
                    "samples": members.iter().map(|&i| serde_json::json!({
                        "id": self.sample_ids[i],
                        "s": self.values[i],
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "global_mean": self.global_mean,
            "clusters": clusters,
        })
    }
}

/// Silhouette of `p` with squared Euclidean dissimilarity in the feature
/// space of `view`. Singletons and the 0/0 case score 0.
pub fn silhouette(view: &FeatureView, p: &Partition) -> Result<SilhouetteReport> {
    if p.sample_ids != view.sample_ids {
        return Err(Error::SampleMismatch);
    }
    if p.k < 2 {
        return Err(Error::TooFewClusters(p.k));
    }
    let n = view.n_samples();
    let sizes = p.cluster_sizes();
    let mut values = vec![0.0; n];
    let mut sums = vec![0.0; p.k];
    for (i, s) in values.iter_mut().enumerate() {
        let own = p.labels[i];
        if sizes[own] < 2 {
            continue;
        }
        sums.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..n {
            if j != i {
                sums[p.labels[j]] += sq_dist(view.point(i), view.point(j));
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..p.k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        *s = if denom > 0.0 { (b - a) / denom } else { 0.0 };
    }
    let mut cluster_order = p.members();
    for members in cluster_order.iter_mut() {
        members.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    }
    let cluster_means = cluster_order
        .iter()
        .map(|m| m.iter().map(|&i| values[i]).sum::<f64>() / m.len() as f64)
        .collect();
    let global_mean = values.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteReport {
        sample_ids: p.sample_ids.clone(),
        labels: p.labels.clone(),
        values,
        cluster_order,
        cluster_means,
        global_mean,
    })
}
