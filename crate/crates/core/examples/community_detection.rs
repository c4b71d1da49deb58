// Modularity-based communities on a population graph. The number of
// communities is not chosen up front.

use stratix::analysis::select_modality;
use stratix::cluster::{community_detect, modularity};
use stratix::graph::{similarity_matrix, sparsify, Metric, SimilarityGraph};
use stratix::metrics::adjusted_rand_index;
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

pub fn run_example() -> stratix::Result<()> {
    // two triangles joined by one weak edge
    let ids = (0..6).map(|i| format!("n{i}")).collect();
    let toy = SimilarityGraph::from_edges(
        ids,
        [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 0.2)],
    )?;
    let p = community_detect(&toy, 0)?;
    println!("toy labels {:?}, Q = {:.4}", p.labels, p.modularity.unwrap_or(f64::NAN));
    println!("Q of everything together: {:.4}", modularity(&toy, &[0; 6]));

    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(2))?;
    let (_, view) = select_modality(&cohort.matrix_a, None)?;
    let graph = sparsify(&similarity_matrix(&view, Metric::Pearson)?, 0.3);
    let p = community_detect(&graph, 9)?;
    println!(
        "cohort: {} communities, sizes {:?}, ARI {:.3}",
        p.k,
        p.cluster_sizes(),
        adjusted_rand_index(&p.labels, &cohort.planted_a)
    );
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
