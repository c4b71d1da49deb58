// Restricts a modality to an analyst's feature list. Unknown ids are
// reported back rather than rejected.

use stratix::features::{parse_feature_list, select_features};
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

pub fn run_example() -> stratix::Result<()> {
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(7))?;
    let requested = parse_feature_list("gene_003, gene_001\ngene_999\ngene_003\n");
    let (selection, view) = select_features(&cohort.matrix_a, &requested)?;
    println!("requested {:?}", selection.requested);
    println!("matched   {:?}", selection.matched);
    println!("unmatched {:?}", selection.unmatched);
    println!(
        "view: {} samples x {} features; first sample {:?}",
        view.n_samples(),
        view.n_features(),
        view.point(0)
    );
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
