// Cross-tabulates two partitions, lays out the parallel-sets model and
// compares two selections built from its ribbons.

use stratix::analysis::select_modality;
use stratix::cluster::kmeans;
use stratix::integrate::{build_parallel_sets, compare_selections, cross_tab, Atom, SelectionSpec, Side};
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

pub fn run_example() -> stratix::Result<()> {
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(12))?;
    let (_, view_a) = select_modality(&cohort.matrix_a, None)?;
    let (_, view_b) = select_modality(&cohort.matrix_b, None)?;
    let pa = kmeans(&view_a, 2, 1)?;
    let pb = kmeans(&view_b, 2, 1)?;

    let table = cross_tab(&pa, &pb)?;
    println!("counts {:?}", table.counts);
    let model = build_parallel_sets(&table);
    for r in &model.ribbons {
        println!("ribbon a{} -> b{}: {}", r.a, r.b, r.size);
    }

    let selections = [
        SelectionSpec::new("concordant", vec![Atom::Ribbon { a: 0, b: 0 }, Atom::Ribbon { a: 1, b: 1 }]),
        SelectionSpec::new("discordant", vec![Atom::Ribbon { a: 0, b: 1 }, Atom::Ribbon { a: 1, b: 0 }]),
    ];
    let cmp = compare_selections(&selections, &table, &cohort.clinical)?;
    if let Some(lr) = &cmp.logrank {
        println!("combined selections: chi2 {:.2}, p {:.2e}", lr.statistic, lr.p_value);
    }

    // a single modality on its own does not separate outcome here
    let by_a = [
        SelectionSpec::new("a0", vec![Atom::Block { modality: Side::A, cluster: 0 }]),
        SelectionSpec::new("a1", vec![Atom::Block { modality: Side::A, cluster: 1 }]),
    ];
    let cmp = compare_selections(&by_a, &table, &cohort.clinical)?;
    if let Some(lr) = &cmp.logrank {
        println!("modality A alone: p {:.3}", lr.p_value);
    }
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
