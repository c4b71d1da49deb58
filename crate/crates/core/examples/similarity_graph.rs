// Builds the sample similarity matrix and sweeps the sparsification
// threshold, printing how the population graph falls apart.

use stratix::analysis::select_modality;
use stratix::graph::{graph_summary, median_similarity, similarity_matrix, sparsify, Metric};
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

pub fn run_example() -> stratix::Result<()> {
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(6))?;
    let (_, view) = select_modality(&cohort.matrix_b, None)?;
    let sim = similarity_matrix(&view, Metric::Pearson)?;
    println!("median similarity {:.3}", median_similarity(&sim));
    for t in [-0.5, 0.0, 0.3, 0.6, 0.9] {
        let s = graph_summary(&sparsify(&sim, t));
        println!("threshold {t:>4}: {} edges, {} components", s.edges, s.components);
    }

    let g = sparsify(&sim, 0.9);
    let json = g.to_json(None);
    println!("{} nodes, {} links in the view payload", json["nodes"].as_array().map_or(0, Vec::len), json["links"].as_array().map_or(0, Vec::len));
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
