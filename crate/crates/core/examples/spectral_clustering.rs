// Spectral clustering on the thresholded similarity graph, with the
// default (median) threshold and with an explicit one.

use stratix::analysis::select_modality;
use stratix::cluster::spectral;
use stratix::graph::Metric;
use stratix::metrics::adjusted_rand_index;
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

pub fn run_example() -> stratix::Result<()> {
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(5))?;
    let (_, view) = select_modality(&cohort.matrix_b, None)?;

    for (metric, threshold) in [
        (Metric::Euclidean, None),
        (Metric::Pearson, None),
        (Metric::Pearson, Some(0.5)),
    ] {
        let p = spectral(&view, 2, metric, threshold, 3)?;
        println!(
            "{metric} threshold {:.3}: sizes {:?}, ARI {:.3}",
            p.params.threshold.unwrap_or(f64::NAN),
            p.cluster_sizes(),
            adjusted_rand_index(&p.labels, &cohort.planted_b)
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
