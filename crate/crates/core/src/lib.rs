//! Integrative patient stratification.
//!
//! A cohort is measured under two molecular modalities (for example mRNA
//! and miRNA expression). Each modality is clustered on a user-chosen
//! feature list; the two partitions are cross-tabulated into a parallel-sets
//! model whose blocks and ribbons can be combined into patient selections,
//! and those selections are compared by Kaplan-Meier curves and the
//! log-rank test.
//!
//! The modules follow the workflow:
//!
//! - [`ingest`]: expression matrices, clinical table, cohort alignment
//! - [`features`]: feature lists and per-modality views
//! - [`cluster`]: k-means, spectral, community detection, silhouette, heatmap order
//! - [`graph`]: similarity matrices and threshold-sparsified population graphs
//! - [`survival`]: Kaplan-Meier, log-rank, chi-square tail
//! - [`integrate`]: contingency table, parallel sets, selections
//! - [`analysis`] and [`pipeline`]: end-to-end composition and batch runs
//! - [`synth`]: planted synthetic cohorts
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod analysis;
pub mod cluster;
pub mod error;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod integrate;
pub mod metrics;
pub mod pipeline;
pub mod survival;
pub mod synth;

pub use error::{Error, Result};
