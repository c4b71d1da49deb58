// k-means on a planted cohort, scored against the planted subgroups.

use stratix::analysis::select_modality;
use stratix::cluster::{kmeans, kmeans_with, KMeansOptions};
use stratix::metrics::adjusted_rand_index;
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};

pub fn run_example() -> stratix::Result<()> {
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(11))?;
    let (_, view) = select_modality(&cohort.matrix_a, None)?;

    let p = kmeans(&view, 2, 42)?;
    println!("k=2 sizes {:?} wcss {:.3}", p.cluster_sizes(), p.wcss.unwrap_or(f64::NAN));
    println!("ARI vs planted: {:.3}", adjusted_rand_index(&p.labels, &cohort.planted_a));

    for k in 1..=5 {
        let opts = KMeansOptions { n_init: 5, ..KMeansOptions::new(k, 42) };
        let p = kmeans_with(&view, &opts)?;
        println!("k={k} wcss {:.3}", p.wcss.unwrap_or(f64::NAN));
    }
    print!("{}", &p.to_csv()[..60]);
    println!("...");
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
