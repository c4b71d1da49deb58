// Silhouette values and the clustered heatmap arrangement for a
// k-means partition.

use stratix::analysis::select_modality;
use stratix::cluster::{heatmap_order, kmeans, silhouette};
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

pub fn run_example() -> stratix::Result<()> {
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(4))?;
    let (_, view) = select_modality(&cohort.matrix_a, None)?;
    for k in 2..=4 {
        let p = kmeans(&view, k, 1)?;
        let report = silhouette(&view, &p)?;
        println!(
            "k={k}: global {:.3}, per cluster {:?}",
            report.global_mean,
            report.cluster_means.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>()
        );
    }

    let p = kmeans(&view, 2, 1)?;
    let layout = heatmap_order(&view, &p)?;
    println!("blocks {:?}", layout.blocks);
    let first: Vec<&str> = layout.column_order[..5]
        .iter()
        .map(|&s| view.sample_ids[s].as_str())
        .collect();
    println!("first columns {first:?}");
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
