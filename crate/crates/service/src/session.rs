//! Per-session workflow state. Everything here is synchronous; the HTTP
//! layer only adds locking, timeouts and routing. All payloads come from
//! `stratix::analysis`, so a session serves exactly what in-process
//! composition would produce.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stratix::analysis::{
    analyze_modality, cohort_summary, comparison_payload, graph_csv, graph_payload,
    heatmap_payload, normalize_cohort, parallel_sets_csv, parallel_sets_payload,
    silhouette_payload, survival_curves_csv, ClusteringRequest, ModalityAnalysis,
};
use stratix::features::{select_features, FeatureSelection, FeatureView};
use stratix::ingest::{align_cohort, parse_clinical_table, parse_expression_matrix, Cohort};
use stratix::integrate::{
    build_parallel_sets, compare_selections, cross_tab, resolve_selection, Comparison,
    ContingencyTable, SelectionSpec, Side,
};

use crate::error::ServiceError;

type Result<T> = std::result::Result<T, ServiceError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Ingested,
    FeaturesSet,
    Clustered,
    Integrated,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Ingested => "ingested",
            Phase::FeaturesSet => "features_set",
            Phase::Clustered => "clustered",
            Phase::Integrated => "integrated",
        }
    }
}

/// The three uploads plus normalization switches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateRequest {
    pub matrix_a: String,
    pub matrix_b: String,
    pub clinical: String,
    #[serde(default = "default_a")]
    pub modality_a: String,
    #[serde(default = "default_b")]
    pub modality_b: String,
    #[serde(default)]
    pub log_transform: bool,
    #[serde(default)]
    pub zscore: bool,
}

fn default_a() -> String {
    "mrna".into()
}

fn default_b() -> String {
    "mirna".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewName {
    Heatmap(Side),
    Silhouette(Side),
    Graph(Side),
    ParallelSets,
    Survival,
}

impl FromStr for ViewName {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "heatmap_a" => ViewName::Heatmap(Side::A),
            "heatmap_b" => ViewName::Heatmap(Side::B),
            "silhouette_a" => ViewName::Silhouette(Side::A),
            "silhouette_b" => ViewName::Silhouette(Side::B),
            "graph_a" => ViewName::Graph(Side::A),
            "graph_b" => ViewName::Graph(Side::B),
            "parallel_sets" => ViewName::ParallelSets,
            "survival" => ViewName::Survival,
            other => {
                return Err(ServiceError::new(404, "unknown_view", format!("no view `{other}`"))
                    .with_detail(json!({ "view": other })))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    SvgData,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svg_data" => Ok(ExportFormat::SvgData),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(ServiceError::bad_request(format!(
                "unknown export format `{other}` (expected svg_data or csv)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct ModalityState {
    requested: Option<Vec<String>>,
    selection: Option<(FeatureSelection, FeatureView)>,
    request: Option<ClusteringRequest>,
    analysis: Option<ModalityAnalysis>,
}

/// Everything needed to rebuild a session by replaying its calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub inputs: CreateRequest,
    pub features: [Option<Vec<String>>; 2],
    pub clustering: [Option<ClusteringRequest>; 2],
    pub selections: Vec<SelectionSpec>,
    pub survival: Option<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    revision: u64,
    inputs: CreateRequest,
    cohort: Cohort,
    modalities: [ModalityState; 2],
    selections: Vec<SelectionSpec>,
    comparison: Option<(Vec<String>, Comparison)>,
}

fn idx(side: Side) -> usize {
    match side {
        Side::A => 0,
        Side::B => 1,
    }
}

impl Session {
    pub fn create(id: String, req: CreateRequest) -> Result<Self> {
        let a = parse_expression_matrix(&req.matrix_a, &req.modality_a)?;
        let b = parse_expression_matrix(&req.matrix_b, &req.modality_b)?;
        let clinical = parse_clinical_table(&req.clinical)?;
        let cohort = align_cohort(&a, &b, &clinical)?;
        let cohort = normalize_cohort(&cohort, req.log_transform, req.zscore)?;
        Ok(Self {
            id,
            revision: 1,
            inputs: req,
            cohort,
            modalities: Default::default(),
            selections: Vec::new(),
            comparison: None,
        })
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn phase(&self) -> Phase {
        if !self.selections.is_empty() || self.comparison.is_some() {
            Phase::Integrated
        } else if self.modalities.iter().all(|m| m.analysis.is_some()) {
            Phase::Clustered
        } else if self.modalities.iter().any(|m| m.selection.is_some()) {
            Phase::FeaturesSet
        } else {
            Phase::Ingested
        }
    }

    pub fn cohort(&self) -> &Cohort {
        &self.cohort
    }

    pub fn analysis(&self, side: Side) -> Option<&ModalityAnalysis> {
        self.modalities[idx(side)].analysis.as_ref()
    }

    fn envelope(&self, mut body: Value) -> Value {
        body["session_id"] = self.id.clone().into();
        body["revision"] = self.revision.into();
        body["phase"] = self.phase().as_str().into();
        body
    }

    pub fn status(&self) -> Value {
        let modality = |side: Side| {
            let m = &self.modalities[idx(side)];
            json!({
                "features": m.selection.as_ref().map(|(s, _)| s.matched.len()),
                "clustering": m.request,
                "k": m.analysis.as_ref().map(|a| a.partition.k),
            })
        };
        self.envelope(json!({
            "summary": cohort_summary(&self.cohort),
            "a": modality(Side::A),
            "b": modality(Side::B),
            "selections": self.selections.iter().map(|s| &s.name).collect::<Vec<_>>(),
        }))
    }

    fn bump(&mut self) {
        self.revision += 1;
    }

    fn clear_integration(&mut self) {
        self.selections.clear();
        self.comparison = None;
    }

    /// Feature ids of a modality in file order, paged.
    pub fn list_features(&self, side: Side, offset: usize, limit: usize) -> Value {
        let m = match side {
            Side::A => &self.cohort.matrix_a,
            Side::B => &self.cohort.matrix_b,
        };
        let page: Vec<&String> = m.feature_ids.iter().skip(offset).take(limit).collect();
        json!({
            "modality": m.modality_name,
            "total": m.n_features(),
            "offset": offset,
            "features": page,
        })
    }

    pub fn set_features(&mut self, side: Side, ids: Vec<String>) -> Result<Value> {
        let matrix = match side {
            Side::A => &self.cohort.matrix_a,
            Side::B => &self.cohort.matrix_b,
        };
        let (selection, view) = select_features(matrix, &ids)?;
        let m = &mut self.modalities[idx(side)];
        m.requested = Some(ids);
        m.selection = Some((selection.clone(), view));
        m.request = None;
        m.analysis = None;
        self.clear_integration();
        self.bump();
        Ok(self.envelope(json!({ "modality": side, "selection": selection })))
    }

    pub fn cluster(&mut self, side: Side, request: ClusteringRequest) -> Result<Value> {
        let phase = self.phase();
        let m = &mut self.modalities[idx(side)];
        let Some((_, view)) = &m.selection else {
            return Err(ServiceError::phase_violation(
                format!("set features for modality {side} before clustering it"),
                phase.as_str(),
            ));
        };
        let analysis = analyze_modality(view, &request)?;
        let sidecar = analysis.partition.sidecar_json();
        m.request = Some(request);
        m.analysis = Some(analysis);
        self.clear_integration();
        self.bump();
        Ok(self.envelope(json!({ "modality": side, "partition": sidecar })))
    }

    fn clustered(&self, side: Side) -> Result<&ModalityAnalysis> {
        self.analysis(side)
            .ok_or_else(|| ServiceError::not_clustered(&side.to_string()))
    }

    fn table(&self) -> Result<ContingencyTable> {
        let a = self.clustered(Side::A)?;
        let b = self.clustered(Side::B)?;
        Ok(cross_tab(&a.partition, &b.partition)?)
    }

    fn table_for_integration(&self) -> Result<ContingencyTable> {
        if self.analysis(Side::A).is_none() || self.analysis(Side::B).is_none() {
            return Err(ServiceError::phase_violation(
                "cluster both modalities before integrative stratification",
                self.phase().as_str(),
            ));
        }
        self.table()
    }

    pub fn view(&self, name: ViewName) -> Result<String> {
        Ok(match name {
            ViewName::Heatmap(side) => heatmap_payload(self.clustered(side)?, side),
            ViewName::Silhouette(side) => silhouette_payload(self.clustered(side)?)?,
            ViewName::Graph(side) => graph_payload(self.clustered(side)?, side),
            ViewName::ParallelSets => parallel_sets_payload(&build_parallel_sets(&self.table()?)),
            ViewName::Survival => comparison_payload(&self.last_comparison()?.1),
        })
    }

    fn last_comparison(&self) -> Result<&(Vec<String>, Comparison)> {
        self.comparison.as_ref().ok_or_else(|| {
            ServiceError::new(409, "no_comparison", "no survival comparison has been run")
        })
    }

    /// `(content type, body)` for an export.
    pub fn export(&self, name: ViewName, format: ExportFormat) -> Result<(&'static str, String)> {
        if format == ExportFormat::SvgData {
            return Ok(("application/json", self.view(name)?));
        }
        let csv = match name {
            ViewName::Heatmap(side) => {
                let a = self.clustered(side)?;
                a.heatmap.to_csv(&a.view)
            }
            ViewName::Silhouette(side) => {
                let a = self.clustered(side)?;
                a.silhouette
                    .as_ref()
                    .ok_or(stratix::Error::TooFewClusters(a.partition.k))?
                    .to_csv()
            }
            ViewName::Graph(side) => graph_csv(&self.clustered(side)?.graph),
            ViewName::ParallelSets => parallel_sets_csv(&build_parallel_sets(&self.table()?)),
            ViewName::Survival => survival_curves_csv(&self.last_comparison()?.1),
        };
        Ok(("text/csv; charset=utf-8", csv))
    }

    /// Adds or replaces a named selection after checking it resolves to at
    /// least one patient.
    pub fn define_selection(&mut self, spec: SelectionSpec) -> Result<Value> {
        let table = self.table_for_integration()?;
        if spec.name.trim().is_empty() {
            return Err(ServiceError::bad_request("selection name must not be empty"));
        }
        let ids = resolve_selection(&spec.atoms, &table)?;
        if ids.is_empty() {
            return Err(stratix::Error::EmptyGroup(spec.name.clone()).into());
        }
        match self.selections.iter_mut().find(|s| s.name == spec.name) {
            Some(existing) => *existing = spec.clone(),
            None => self.selections.push(spec.clone()),
        }
        self.comparison = None;
        self.bump();
        Ok(self.envelope(json!({
            "selection": spec,
            "size": ids.len(),
            "sample_ids": ids,
        })))
    }

    pub fn delete_selection(&mut self, name: &str) -> Result<Value> {
        let before = self.selections.len();
        self.selections.retain(|s| s.name != name);
        if self.selections.len() == before {
            return Err(unknown_selection(name));
        }
        self.comparison = None;
        self.bump();
        Ok(self.envelope(json!({ "deleted": name })))
    }

    /// Compares the named selections; the body is the comparison payload.
    pub fn survival(&mut self, names: Vec<String>) -> Result<String> {
        let table = self.table_for_integration()?;
        let specs = names
            .iter()
            .map(|n| {
                self.selections
                    .iter()
                    .find(|s| &s.name == n)
                    .cloned()
                    .ok_or_else(|| unknown_selection(n))
            })
            .collect::<Result<Vec<_>>>()?;
        let cmp = compare_selections(&specs, &table, &self.cohort.clinical)?;
        let body = comparison_payload(&cmp);
        self.comparison = Some((names, cmp));
        self.bump();
        Ok(body)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            inputs: self.inputs.clone(),
            features: self.modalities.clone().map(|m| m.requested),
            clustering: self.modalities.clone().map(|m| m.request),
            selections: self.selections.clone(),
            survival: self.comparison.as_ref().map(|(names, _)| names.clone()),
        }
    }

    /// Rebuilds a session by replaying a snapshot's calls in workflow order.
    pub fn restore(id: String, snap: Snapshot) -> Result<Self> {
        let mut s = Session::create(id, snap.inputs)?;
        for side in [Side::A, Side::B] {
            if let Some(ids) = &snap.features[idx(side)] {
                s.set_features(side, ids.clone())?;
            }
        }
        for side in [Side::A, Side::B] {
            if let Some(req) = &snap.clustering[idx(side)] {
                s.cluster(side, req.clone())?;
            }
        }
        for spec in snap.selections {
            s.define_selection(spec)?;
        }
        if let Some(names) = snap.survival {
            s.survival(names)?;
        }
        Ok(s)
    }
}

fn unknown_selection(name: &str) -> ServiceError {
    ServiceError::new(404, "unknown_selection", format!("no selection named `{name}`"))
        .with_detail(json!({ "selection": name }))
}
