//! User-driven feature lists and the restricted per-modality views that all
//! clustering and graph construction operate on.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ExpressionMatrix;

/// Splits on commas and line breaks, trims, drops empties and keeps the
/// first occurrence of each id.
pub fn parse_feature_list(text: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    text.split([',', '\n', '\r'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .filter(|s| seen.insert(*s))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub modality_name: String,
    pub requested: Vec<String>,
    pub matched: Vec<String>,
    pub unmatched: Vec<String>,
}

/// The selected features of one modality, laid out sample-major: one point
/// per sample whose coordinates are the matched features in request order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureView {
    pub modality_name: String,
    pub feature_ids: Vec<String>,
    pub sample_ids: Vec<String>,
    /// Row indices into the source matrix, parallel to `feature_ids`.
    pub source_rows: Vec<usize>,
    points: Vec<Vec<f64>>,
}

impl FeatureView {
    /// Builds a view directly from sample points (one `Vec` per sample).
    pub fn from_points(
        modality_name: impl Into<String>,
        sample_ids: Vec<String>,
        feature_ids: Vec<String>,
        points: Vec<Vec<f64>>,
    ) -> Self {
        assert_eq!(sample_ids.len(), points.len(), "one point per sample");
        assert!(
            points.iter().all(|p| p.len() == feature_ids.len()),
            "every point needs one coordinate per feature"
        );
        let source_rows = (0..feature_ids.len()).collect();
        Self {
            modality_name: modality_name.into(),
            feature_ids,
            sample_ids,
            source_rows,
            points,
        }
    }

    /// Convenience for anonymous points; samples are named `s0, s1, ...`.
    pub fn from_anonymous_points(points: Vec<Vec<f64>>) -> Self {
        let dim = points.first().map_or(0, Vec::len);
        let sample_ids = (0..points.len()).map(|i| format!("s{i}")).collect();
        let feature_ids = (0..dim).map(|f| format!("f{f}")).collect();
        Self::from_points("anon", sample_ids, feature_ids, points)
    }

    pub fn n_samples(&self) -> usize {
        self.points.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, sample: usize) -> &[f64] {
        &self.points[sample]
    }

    /// Value of the `f`-th selected feature for sample `s`.
    pub fn value(&self, f: usize, s: usize) -> f64 {
        self.points[s][f]
    }
}

pub fn select_features(
    matrix: &ExpressionMatrix,
    requested: &[String],
) -> Result<(FeatureSelection, FeatureView)> {
    if requested.is_empty() {
        return Err(Error::EmptyRequest);
    }
    let mut seen = HashSet::new();
    let mut matched = Vec::new();
    let mut unmatched = Vec::new();
    let mut rows = Vec::new();
    for id in requested {
        if !seen.insert(id.as_str()) {
            continue;
        }
        match matrix.feature_index(id) {
            Some(r) => {
                matched.push(id.clone());
                rows.push(r);
            }
            None => unmatched.push(id.clone()),
        }
    }
    if matched.is_empty() {
        return Err(Error::NoFeaturesMatched(unmatched));
    }
    let points = (0..matrix.n_samples())
        .map(|s| rows.iter().map(|&r| matrix.get(r, s)).collect())
        .collect();
    let view = FeatureView {
        modality_name: matrix.modality_name.clone(),
        feature_ids: matched.clone(),
        sample_ids: matrix.sample_ids.clone(),
        source_rows: rows,
        points,
    };
    let selection = FeatureSelection {
        modality_name: matrix.modality_name.clone(),
        requested: requested.to_vec(),
        matched,
        unmatched,
    };
    Ok((selection, view))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn five_by_three() -> ExpressionMatrix {
        let rows = (0..5)
            .map(|f| (0..3).map(|s| (10 * f + s) as f64).collect())
            .collect();
        ExpressionMatrix::from_rows(
            "mrna",
            ids(&["g0", "g1", "g2", "g3", "g4"]),
            ids(&["a", "b", "c"]),
            rows,
        )
        .unwrap()
    }

    #[test]
    fn parse_list_examples() {
        assert_eq!(parse_feature_list("TP53, PIK3CA\nGATA3"), ids(&["TP53", "PIK3CA", "GATA3"]));
        assert_eq!(parse_feature_list("a,,a , b"), ids(&["a", "b"]));
        assert!(parse_feature_list(" \n, ").is_empty());
        assert_eq!(parse_feature_list("x\r\ny\r\n"), ids(&["x", "y"]));
    }

    #[test]
    fn mirna_panel_list() {
        let text = "hsa-mir-130a, hsa-mir-222, hsa-mir-29a, hsa-mir-23a, hsa-mir-24-1, \
                    hsa-mir-24-2, hsa-mir-30a, hsa-mir-27a, hsa-mir-22, hsa-mir-100";
        let list = parse_feature_list(text);
        assert_eq!(list.len(), 10);
        assert_eq!(list[0], "hsa-mir-130a");
        assert_eq!(list[4], "hsa-mir-24-1");
        assert_eq!(list[9], "hsa-mir-100");
    }

    #[test]
    fn select_all_is_identity() {
        let m = five_by_three();
        let (sel, view) = select_features(&m, &m.feature_ids).unwrap();
        assert_eq!(sel.matched, m.feature_ids);
        assert!(sel.unmatched.is_empty());
        for f in 0..5 {
            for s in 0..3 {
                assert_eq!(view.value(f, s), m.get(f, s));
            }
        }
    }

    #[test]
    fn select_none_lists_all_unmatched() {
        let m = five_by_three();
        let err = select_features(&m, &ids(&["absent1", "absent2"])).unwrap_err();
        assert_eq!(err, Error::NoFeaturesMatched(ids(&["absent1", "absent2"])));
        assert_eq!(select_features(&m, &[]).unwrap_err(), Error::EmptyRequest);
    }

    #[test]
    fn shuffled_subset_follows_request_order() {
        let m = five_by_three();
        let req = ids(&["g3", "zz", "g0", "g4", "g3"]);
        let (sel, view) = select_features(&m, &req).unwrap();
        assert_eq!(sel.matched, ids(&["g3", "g0", "g4"]));
        assert_eq!(sel.unmatched, ids(&["zz"]));
        assert_eq!(sel.matched.len() + sel.unmatched.len(), 4);
        // row-by-row lookup oracle
        for (f, id) in sel.matched.iter().enumerate() {
            let src = m.feature_ids.iter().position(|x| x == id).unwrap();
            for s in 0..3 {
                assert_eq!(view.value(f, s), m.get(src, s));
            }
        }
        let (_, again) = select_features(&m, &sel.matched).unwrap();
        assert_eq!(again, view);
    }

    #[test]
    fn matching_is_case_sensitive() {
        let m = five_by_three();
        assert!(select_features(&m, &ids(&["G0"])).is_err());
    }
}
