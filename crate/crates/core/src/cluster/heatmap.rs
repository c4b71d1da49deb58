use serde::{Deserialize, Serialize};

use super::{sq_dist, Partition};
use crate::error::{Error, Result};
use crate::features::FeatureView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeatmapBlock {
    pub cluster: usize,
    /// Half-open column range `[start, end)`.
    pub start: usize,
    pub end: usize,
}

/// Column/row arrangement of the clustered heatmap. Columns are grouped by
/// cluster (label order), and within a block sorted by ascending distance
/// to the cluster centroid, ties broken by sample id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapLayout {
    pub column_order: Vec<usize>,
    pub row_order: Vec<usize>,
    pub blocks: Vec<HeatmapBlock>,
}

impl HeatmapLayout {
    /// Payload for the heatmap view, values laid out in display order.
    pub fn to_json(&self, view: &FeatureView) -> serde_json::Value {
        let columns: Vec<&String> = self.column_order.iter().map(|&s| &view.sample_ids[s]).collect();
        let rows: Vec<&String> = self.row_order.iter().map(|&f| &view.feature_ids[f]).collect();
        let values: Vec<Vec<f64>> = self
            .row_order
            .iter()
            .map(|&f| self.column_order.iter().map(|&s| view.value(f, s)).collect())
            .collect();
        serde_json::json!({
            "modality": view.modality_name,
            "columns": columns,
            "rows": rows,
            "blocks": self.blocks,
            "values": values,
        })
    }

    pub fn to_csv(&self, view: &FeatureView) -> String {
        let mut out = String::from("feature_id");
        for &s in &self.column_order {
            out.push(',');
            out.push_str(&view.sample_ids[s]);
        }
        out.push('\n');
        for &f in &self.row_order {
            out.push_str(&view.feature_ids[f]);
            for &s in &self.column_order {
                out.push(',');
                out.push_str(&view.value(f, s).to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn heatmap_order(view: &FeatureView, p: &Partition) -> Result<HeatmapLayout> {
    if p.sample_ids != view.sample_ids {
        return Err(Error::SampleMismatch);
    }
    let dim = view.n_features();
    let mut column_order = Vec::with_capacity(p.n());
    let mut blocks = Vec::with_capacity(p.k);
    for (cluster, members) in p.members().into_iter().enumerate() {
        let mut centroid = vec![0.0; dim];
        for &s in &members {
            for (c, v) in centroid.iter_mut().zip(view.point(s)) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= members.len() as f64);
        let mut keyed: Vec<(f64, usize)> = members
            .into_iter()
            .map(|s| (sq_dist(view.point(s), &centroid).sqrt(), s))
            .collect();
        keyed.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| view.sample_ids[a.1].cmp(&view.sample_ids[b.1]))
        });
        let start = column_order.len();
        column_order.extend(keyed.into_iter().map(|(_, s)| s));
        blocks.push(HeatmapBlock {
            cluster,
            start,
            end: column_order.len(),
        });
    }
    Ok(HeatmapLayout {
        column_order,
        row_order: (0..dim).collect(),
        blocks,
    })
}
