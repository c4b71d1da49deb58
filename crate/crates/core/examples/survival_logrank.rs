// Kaplan-Meier curves and a log-rank test for two patient groups.

use stratix::ingest::parse_clinical_table;
use stratix::survival::{chi_square_sf, km_curve, logrank};

const CLINICAL: &str = "\
sample_id,survival_time,survival_status
a1,6,1
a2,6,1
a3,6,1
a4,7,1
a5,10,0
a6,13,1
a7,16,1
b1,1,1
b2,1,1
b3,2,1
b4,2,1
b5,3,1
b6,4,1
b7,5,0
";

pub fn run_example() -> stratix::Result<()> {
    let clinical = parse_clinical_table(CLINICAL)?;
    let ids = |p: &str| -> Vec<String> {
        clinical.sample_ids().filter(|s| s.starts_with(p)).map(str::to_string).collect()
    };
    let groups = vec![("treated".to_string(), ids("a")), ("control".to_string(), ids("b"))];
    for (label, members) in &groups {
        let curve = km_curve(label, members, &clinical)?;
        print!("{label}\n{}", curve.to_csv());
        println!("censored at {:?}", curve.censor_times);
    }
    let lr = logrank(&groups, &clinical)?;
    println!(
        "O = {:?}, E = {:?}, chi2 = {:.4}, p = {:.3e}",
        lr.observed, lr.expected, lr.statistic, lr.p_value
    );
    println!("chi2(1) tail at 3.841459 = {:.6}", chi_square_sf(3.841459, 1)?);
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
