//! `stratix` command line: batch pipeline, single-modality clustering,
//! synthetic cohorts and the HTTP service.
//!
//! Exit codes: 0 ok, 1 internal or data error, 2 usage or config error.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use stratix::analysis::{
    analyze_modality, cohort_summary, graph_payload, heatmap_payload, normalize_cohort,
    select_modality, silhouette_payload, to_json_string, ClusteringRequest,
};
use stratix::cluster::Method;
use stratix::features::parse_feature_list;
use stratix::graph::Metric;
use stratix::ingest::{align_cohort, parse_clinical_table, parse_expression_matrix};
use stratix::integrate::Side;
use stratix::pipeline::{run_pipeline, PipelineConfig};
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};
use stratix::Error;

#[derive(Parser)]
#[command(name = "stratix", version, about = "Integrative patient stratification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and align the three inputs and print a cohort summary.
    IngestCheck {
        #[arg(long)]
        matrix_a: PathBuf,
        #[arg(long)]
        matrix_b: PathBuf,
        #[arg(long)]
        clinical: PathBuf,
        #[arg(long)]
        log_transform: bool,
        #[arg(long)]
        zscore: bool,
    },
    /// Cluster one expression matrix and write partition, silhouette,
    /// heatmap and graph files.
    Cluster {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value = "mrna")]
        modality: String,
        /// Feature list file, one id per line; all features when absent.
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "kmeans")]
        method: MethodArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        log_transform: bool,
        #[arg(long)]
        zscore: bool,
        #[arg(long, short)]
        output_dir: PathBuf,
    },
    /// Run the full pipeline from a TOML config.
    Stratify {
        config: PathBuf,
        #[arg(long, short)]
        output_dir: Option<PathBuf>,
        /// Overrides the seed of both modalities.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        k_a: Option<usize>,
        #[arg(long)]
        k_b: Option<usize>,
    },
    /// Write a synthetic cohort with planted subgroups.
    Synth {
        #[arg(long, short)]
        output_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        patients_per_cell: usize,
        #[arg(long, default_value_t = 2)]
        subgroups_a: usize,
        #[arg(long, default_value_t = 2)]
        subgroups_b: usize,
        #[arg(long, default_value_t = 10)]
        features_a: usize,
        #[arg(long, default_value_t = 6)]
        features_b: usize,
        #[arg(long, default_value_t = 6.0)]
        separation: f64,
        /// Comma-separated hazards per combined subgroup, row-major over (a, b).
        /// Defaults to 4:1 for concordant against discordant cells.
        #[arg(long, value_delimiter = ',')]
        hazards: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.1)]
        censoring_rate: f64,
    },
    /// Start the HTTP service.
    Serve {
        /// Defaults to 0.0.0.0:$STRATIX_PORT, else 127.0.0.1:8080.
        #[arg(long)]
        bind: Option<SocketAddr>,
        /// Per-request timeout in seconds.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Kmeans,
    Spectral,
    Community,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Pearson,
    Euclidean,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidSpec(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(format!("{}: {e}", e.code())),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| Failure::Internal(format!("cannot write {name}: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::IngestCheck { matrix_a, matrix_b, clinical, log_transform, zscore } => {
            let a = parse_expression_matrix(&read(&matrix_a)?, "mrna")?;
            let b = parse_expression_matrix(&read(&matrix_b)?, "mirna")?;
            let c = parse_clinical_table(&read(&clinical)?)?;
            let cohort = normalize_cohort(&align_cohort(&a, &b, &c)?, log_transform, zscore)?;
            println!("{}", to_json_string(&cohort_summary(&cohort)));
        }
        Command::Cluster {
            matrix,
            modality,
            features,
            method,
            k,
            seed,
            metric,
            threshold,
            log_transform,
            zscore,
            output_dir,
        } => {
            let m = parse_expression_matrix(&read(&matrix)?, &modality)?
                .normalize(log_transform, zscore)?;
            let list = features.map(|p| read(&p).map(|t| parse_feature_list(&t))).transpose()?;
            let (selection, view) = select_modality(&m, list.as_deref())?;
            if !selection.unmatched.is_empty() {
                eprintln!("unmatched features: {}", selection.unmatched.join(", "));
            }
            let request = ClusteringRequest {
                method: match method {
                    MethodArg::Kmeans => Method::Kmeans,
                    MethodArg::Spectral => Method::Spectral,
                    MethodArg::Community => Method::Community,
                },
                k,
                seed,
                metric: metric.map(|m| match m {
                    MetricArg::Pearson => Metric::Pearson,
                    MetricArg::Euclidean => Metric::Euclidean,
                }),
                threshold,
            };
            let an = analyze_modality(&view, &request)?;
            std::fs::create_dir_all(&output_dir)
                .map_err(|e| Failure::Internal(format!("{}: {e}", output_dir.display())))?;
            write(&output_dir, "partition.csv", &an.partition.to_csv())?;
            write(&output_dir, "partition.json", &to_json_string(&an.partition.sidecar_json()))?;
            if let Some(report) = &an.silhouette {
                write(&output_dir, "silhouette.csv", &report.to_csv())?;
                write(&output_dir, "silhouette.json", &silhouette_payload(&an)?)?;
            }
            write(&output_dir, "heatmap.json", &heatmap_payload(&an, Side::A))?;
            write(&output_dir, "graph.json", &graph_payload(&an, Side::A))?;
            println!("{}", to_json_string(&an.partition.sidecar_json()));
        }
        Command::Stratify { config, output_dir, seed, k_a, k_b } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            if let Some(s) = seed {
                cfg.modality_a.clustering.seed = s;
                cfg.modality_b.clustering.seed = s;
            }
            if k_a.is_some() {
                cfg.modality_a.clustering.k = k_a;
            }
            if k_b.is_some() {
                cfg.modality_b.clustering.k = k_b;
            }
            let out = run_pipeline(&cfg)?;
            for (name, _) in &out.files {
                println!("{}", cfg.output_dir.join(name).display());
            }
        }
        Command::Synth {
            output_dir,
            seed,
            patients_per_cell,
            subgroups_a,
            subgroups_b,
            features_a,
            features_b,
            separation,
            hazards,
            censoring_rate,
        } => {
            let hazards = hazards.unwrap_or_else(|| {
                (0..subgroups_a * subgroups_b)
                    .map(|c| if c / subgroups_b == c % subgroups_b { 4e-3 } else { 1e-3 })
                    .collect()
            });
            let spec = SyntheticCohortSpec {
                patients_per_cell,
                subgroups_a,
                subgroups_b,
                features_a,
                features_b,
                separation,
                hazards,
                censoring_rate,
                seed,
            };
            generate_synthetic(&spec)?.write_to(&output_dir)?;
            println!("{}", output_dir.display());
        }
        Command::Serve { bind, timeout, snapshot_dir } => {
            let addr = match bind {
                Some(a) => a,
                None => stratix_service::default_bind_addr().map_err(Failure::Usage)?,
            };
            let config = stratix_service::ServiceConfig {
                request_timeout: Duration::from_secs(timeout),
                snapshot_dir,
                ..Default::default()
            };
            let rt = tokio::runtime::Runtime::new()
                .map_err(|e| Failure::Internal(e.to_string()))?;
            rt.block_on(stratix_service::serve(addr, config))
                .map_err(|e| Failure::Internal(format!("serve: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
