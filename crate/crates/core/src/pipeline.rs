//! Batch run of the whole workflow from a TOML config to files on disk.
//!
//! ```toml
//! output_dir = "out"
//!
//! [inputs]
//! matrix_a = "matrix_a.csv"
//! matrix_b = "matrix_b.csv"
//! clinical = "clinical.csv"
//! log_transform = false
//! zscore = false
//!
//! [modality_a]
//! features = "features_a.txt"   # optional; all features when absent
//! method = "kmeans"
//! k = 4
//! seed = 1
//!
//! [modality_b]
//! method = "community"
//! metric = "pearson"
//! threshold = 0.6
//!
//! [[selections]]
//! name = "high"
//! atoms = [{ kind = "ribbon", a = 0, b = 0 }, { kind = "block", modality = "b", cluster = 2 }]
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    analyze_modality, censoring_csv, cohort_summary, comparison_payload, graph_payload,
    heatmap_payload, normalize_cohort, select_modality, silhouette_payload, survival_curves_csv,
    to_json_string, ClusteringRequest, ModalityAnalysis,
};
use crate::error::{Error, Result};
use crate::features::parse_feature_list;
use crate::ingest::{align_cohort, parse_clinical_table, parse_expression_matrix};
use crate::integrate::{build_parallel_sets, compare_selections, cross_tab, SelectionSpec, Side};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsConfig {
    pub matrix_a: PathBuf,
    pub matrix_b: PathBuf,
    pub clinical: PathBuf,
    #[serde(default = "default_modality_a")]
    pub modality_a: String,
    #[serde(default = "default_modality_b")]
    pub modality_b: String,
    #[serde(default)]
    pub log_transform: bool,
    #[serde(default)]
    pub zscore: bool,
}

fn default_modality_a() -> String {
    "mrna".into()
}

fn default_modality_b() -> String {
    "mirna".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityConfig {
    #[serde(default)]
    pub features: Option<PathBuf>,
    #[serde(flatten)]
    pub clustering: ClusteringRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub inputs: InputsConfig,
    pub modality_a: ModalityConfig,
    pub modality_b: ModalityConfig,
    #[serde(default)]
    pub selections: Vec<SelectionSpec>,
}

impl PipelineConfig {
    /// Parses a config and resolves relative paths against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        fix(&mut cfg.output_dir);
        fix(&mut cfg.inputs.matrix_a);
        fix(&mut cfg.inputs.matrix_b);
        fix(&mut cfg.inputs.clinical);
        if let Some(p) = cfg.modality_a.features.as_mut() {
            fix(p);
        }
        if let Some(p) = cfg.modality_b.features.as_mut() {
            fix(p);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn check_paths(&self) -> Result<()> {
        let mut required = vec![
            &self.inputs.matrix_a,
            &self.inputs.matrix_b,
            &self.inputs.clinical,
        ];
        required.extend(self.modality_a.features.iter());
        required.extend(self.modality_b.features.iter());
        for p in required {
            if !p.is_file() {
                return Err(Error::Config(format!("input file not found: {}", p.display())));
            }
        }
        Ok(())
    }
}

/// Results of a pipeline run, kept in memory alongside the written files.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub analysis_a: ModalityAnalysis,
    pub analysis_b: ModalityAnalysis,
    pub files: Vec<(String, String)>,
}

impl PipelineOutput {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs the workflow and returns every output file's name and contents
/// without touching the output directory.
pub fn compute_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.check_paths()?;
    let a = parse_expression_matrix(&read(&cfg.inputs.matrix_a)?, &cfg.inputs.modality_a)?;
    let b = parse_expression_matrix(&read(&cfg.inputs.matrix_b)?, &cfg.inputs.modality_b)?;
    let clinical = parse_clinical_table(&read(&cfg.inputs.clinical)?)?;
    let cohort = align_cohort(&a, &b, &clinical)?;
    let cohort = normalize_cohort(&cohort, cfg.inputs.log_transform, cfg.inputs.zscore)?;

    let features = |m: &ModalityConfig| -> Result<Option<Vec<String>>> {
        m.features
            .as_ref()
            .map(|p| read(p).map(|t| parse_feature_list(&t)))
            .transpose()
    };
    let (_, view_a) = select_modality(&cohort.matrix_a, features(&cfg.modality_a)?.as_deref())?;
    let (_, view_b) = select_modality(&cohort.matrix_b, features(&cfg.modality_b)?.as_deref())?;
    let analysis_a = analyze_modality(&view_a, &cfg.modality_a.clustering)?;
    let analysis_b = analyze_modality(&view_b, &cfg.modality_b.clustering)?;

    let table = cross_tab(&analysis_a.partition, &analysis_b.partition)?;
    let model = build_parallel_sets(&table);

    let mut files = vec![("cohort.json".to_string(), to_json_string(&cohort_summary(&cohort)))];
    for (side, an) in [(Side::A, &analysis_a), (Side::B, &analysis_b)] {
        files.push((format!("partition_{side}.csv"), an.partition.to_csv()));
        files.push((
            format!("partition_{side}.json"),
            to_json_string(&an.partition.sidecar_json()),
        ));
        if let Some(report) = &an.silhouette {
            files.push((format!("silhouette_{side}.csv"), report.to_csv()));
            files.push((format!("silhouette_{side}.json"), silhouette_payload(an)?));
        }
        files.push((format!("heatmap_{side}.json"), heatmap_payload(an, side)));
        files.push((format!("graph_{side}.json"), graph_payload(an, side)));
    }
    files.push(("parallel_sets.json".into(), to_json_string(&model)));
    if !cfg.selections.is_empty() {
        let cmp = compare_selections(&cfg.selections, &table, &cohort.clinical)?;
        files.push(("survival_curves.csv".into(), survival_curves_csv(&cmp)));
        files.push(("survival_censoring.csv".into(), censoring_csv(&cmp)));
        files.push(("survival.json".into(), comparison_payload(&cmp)));
        if let Some(lr) = &cmp.logrank {
            files.push(("logrank.json".into(), to_json_string(lr)));
        }
    }
    Ok(PipelineOutput {
        analysis_a,
        analysis_b,
        files,
    })
}

/// Runs the workflow and writes its outputs into `cfg.output_dir`. Files
/// are staged in a sibling directory and only moved into place once every
/// step has succeeded, so a failed run leaves no partial outputs.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let out = compute_pipeline(cfg)?;
    let dir = &cfg.output_dir;
    let parent = dir
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let name = dir.file_name().map_or("out".into(), |n| n.to_string_lossy().into_owned());
    let staging = parent.join(format!(".{name}.partial-{}", std::process::id()));
    let write_all = || -> Result<()> {
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir_all(&staging)?;
        for (file, contents) in &out.files {
            fs::write(staging.join(file), contents)?;
        }
        fs::create_dir_all(dir)?;
        for (file, _) in &out.files {
            fs::rename(staging.join(file), dir.join(file))?;
        }
        fs::remove_dir_all(&staging)?;
        Ok(())
    };
    if let Err(e) = write_all() {
        let _ = fs::remove_dir_all(&staging);
        for (file, _) in &out.files {
            let _ = fs::remove_file(dir.join(file));
        }
        return Err(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_with_defaults() {
        let text = r#"
            output_dir = "out"
            [inputs]
            matrix_a = "a.csv"
            matrix_b = "b.csv"
            clinical = "c.csv"
            [modality_a]
            method = "kmeans"
            k = 3
            seed = 9
            [modality_b]
            method = "community"
            metric = "pearson"
            threshold = 0.5
            [[selections]]
            name = "x"
            atoms = [{ kind = "ribbon", a = 0, b = 1 }]
        "#;
        let cfg = PipelineConfig::from_toml_str(text, Path::new("/data")).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("/data/out"));
        assert_eq!(cfg.inputs.matrix_a, PathBuf::from("/data/a.csv"));
        assert_eq!(cfg.modality_a.clustering.k, Some(3));
        assert_eq!(cfg.modality_b.clustering.threshold, Some(0.5));
        assert_eq!(cfg.selections[0].atoms.len(), 1);
        assert!(!cfg.inputs.zscore);
        let again = PipelineConfig::from_toml_str(&cfg.to_toml_string(), Path::new("/")).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_field_is_config_error() {
        let err = PipelineConfig::from_toml_str("output_dir = 'x'\nbogus = 1", Path::new(".")).unwrap_err();
        assert_eq!(err.code(), "config");
    }

    #[test]
    fn missing_input_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"
            output_dir = "out"
            [inputs]
            matrix_a = "nope.csv"
            matrix_b = "b.csv"
            clinical = "c.csv"
            [modality_a]
            method = "kmeans"
            k = 2
            [modality_b]
            method = "kmeans"
            k = 2
        "#;
        let cfg = PipelineConfig::from_toml_str(text, dir.path()).unwrap();
        assert!(matches!(run_pipeline(&cfg), Err(Error::Config(_))));
        assert!(!dir.path().join("out").exists());
    }
}
