use thiserror::Error;

/// Errors produced by the stratification engine.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`])
/// so front ends can react without parsing messages.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty body: {0}")]
    EmptyBody(String),
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("ragged row at line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-numeric cell at line {line}, column {column}: `{value}`")]
    NonNumeric {
        line: usize,
        column: usize,
        value: String,
    },
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("negative survival_time at line {line}: {value}")]
    NegativeSurvivalTime { line: usize, value: f64 },
    #[error("invalid survival_status at line {line}: `{value}` (expected 0 or 1)")]
    InvalidStatus { line: usize, value: String },
    #[error("invalid value at line {line}, column `{column}`: `{value}`")]
    InvalidField {
        line: usize,
        column: String,
        value: String,
    },
    #[error("negative value {value} in feature `{feature}` cannot be log-transformed")]
    NegativeForLog { feature: String, value: f64 },
    #[error("cohort too small: {0} common samples (need at least 2)")]
    CohortTooSmall(usize),
    #[error("no requested feature matched; unmatched: {0:?}")]
    NoFeaturesMatched(Vec<String>),
    #[error("empty feature request")]
    EmptyRequest,
    #[error("k = {k} out of range for {n} samples (allowed {min}..={n})")]
    KOutOfRange { k: usize, n: usize, min: usize },
    #[error("only {distinct} distinct points available for k = {k}")]
    TooFewDistinctPoints { k: usize, distinct: usize },
    #[error("eigen-solver did not converge")]
    EigenNonConvergence,
    #[error("graph has no edges")]
    EdgelessGraph,
    #[error("silhouette needs at least 2 clusters, got {0}")]
    TooFewClusters(usize),
    #[error("partition does not match the feature view samples")]
    SampleMismatch,
    #[error("sample `{0}` has zero variance across the selected features")]
    ZeroVarianceSample(String),
    #[error("unknown sample id `{0}`")]
    UnknownSample(String),
    #[error("empty group or selection `{0}`")]
    EmptyGroup(String),
    #[error("at least two groups required, got {0}")]
    TooFewGroups(usize),
    #[error("overlapping groups share samples {0:?}")]
    OverlappingGroups(Vec<String>),
    #[error("no events observed in any group")]
    NoEvents,
    #[error("all expected event counts are zero")]
    ZeroExpected,
    #[error("log-rank variance is zero while observed and expected events differ")]
    ZeroVariance,
    #[error("atom out of range: {0}")]
    AtomOutOfRange(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid synthetic cohort spec: {0}")]
    InvalidSpec(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable snake_case identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyBody(_) => "empty_body",
            Error::DuplicateId { .. } => "duplicate_id",
            Error::RaggedRow { .. } => "ragged_row",
            Error::NonNumeric { .. } => "non_numeric",
            Error::MissingColumn(_) => "missing_column",
            Error::NegativeSurvivalTime { .. } => "negative_survival_time",
            Error::InvalidStatus { .. } => "invalid_status",
            Error::InvalidField { .. } => "invalid_field",
            Error::NegativeForLog { .. } => "negative_for_log",
            Error::CohortTooSmall(_) => "cohort_too_small",
            Error::NoFeaturesMatched(_) => "no_features_matched",
            Error::EmptyRequest => "empty_request",
            Error::KOutOfRange { .. } => "k_out_of_range",
            Error::TooFewDistinctPoints { .. } => "too_few_distinct_points",
            Error::EigenNonConvergence => "eigen_non_convergence",
            Error::EdgelessGraph => "edgeless_graph",
            Error::TooFewClusters(_) => "too_few_clusters",
            Error::SampleMismatch => "sample_mismatch",
            Error::ZeroVarianceSample(_) => "zero_variance_sample",
            Error::UnknownSample(_) => "unknown_sample",
            Error::EmptyGroup(_) => "empty_group",
            Error::TooFewGroups(_) => "too_few_groups",
            Error::OverlappingGroups(_) => "overlapping_groups",
            Error::NoEvents => "no_events",
            Error::ZeroExpected => "zero_expected",
            Error::ZeroVariance => "zero_variance",
            Error::AtomOutOfRange(_) => "atom_out_of_range",
            Error::Domain(_) => "domain",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl Error {
    /// Structured context for the error: row/column positions, offending
    /// ids and the like. `null` when the message says it all.
    pub fn detail(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Error::DuplicateId { kind, id } => json!({ "kind": kind, "id": id }),
            Error::RaggedRow { line, expected, found } => {
                json!({ "line": line, "expected": expected, "found": found })
            }
            Error::NonNumeric { line, column, value } => {
                json!({ "line": line, "column": column, "value": value })
            }
            Error::MissingColumn(c) => json!({ "column": c }),
            Error::NegativeSurvivalTime { line, value } => json!({ "line": line, "value": value }),
            Error::InvalidStatus { line, value } => json!({ "line": line, "value": value }),
            Error::InvalidField { line, column, value } => {
                json!({ "line": line, "column": column, "value": value })
            }
            Error::NegativeForLog { feature, value } => json!({ "feature": feature, "value": value }),
            Error::CohortTooSmall(n) => json!({ "samples": n }),
            Error::NoFeaturesMatched(ids) => json!({ "unmatched": ids }),
            Error::KOutOfRange { k, n, min } => json!({ "k": k, "n": n, "min": min }),
            Error::TooFewDistinctPoints { k, distinct } => json!({ "k": k, "distinct": distinct }),
            Error::TooFewClusters(k) => json!({ "k": k }),
            Error::ZeroVarianceSample(id) | Error::UnknownSample(id) => json!({ "sample_id": id }),
            Error::EmptyGroup(name) => json!({ "group": name }),
            Error::TooFewGroups(n) => json!({ "groups": n }),
            Error::OverlappingGroups(ids) => json!({ "shared": ids }),
            _ => serde_json::Value::Null,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
