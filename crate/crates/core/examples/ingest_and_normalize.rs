// Parses two expression matrices and a clinical table, aligns them on
// their shared samples and applies log2 and z-score normalization.

use stratix::analysis::normalize_cohort;
use stratix::ingest::{align_cohort, parse_clinical_table, parse_expression_matrix};

const MRNA: &str = "\
feature_id,TCGA-01,TCGA-02,TCGA-03,TCGA-04
ESR1,120.5,3.2,98.1,4.4
ERBB2,10.0,250.3,12.9,230.0
FOXA1,55.0,2.0,61.2,1.5
";

// tab separated, one extra sample
const MIRNA: &str = "\
feature_id\tTCGA-01\tTCGA-02\tTCGA-03\tTCGA-04\tTCGA-05
hsa-mir-21\t8.1\t9.4\t7.7\t9.9\t8.8
hsa-mir-155\t3.3\t5.0\t2.9\t5.6\t4.1
";

const CLINICAL: &str = "\
sample_id,age,tumor_grade,survival_time,survival_status
TCGA-01,54,2,1830,0
TCGA-02,61,3,402,1
TCGA-03,47,NA,2210,0
TCGA-04,70,3,377,1
TCGA-06,66,1,900,1
";

pub fn run_example() -> stratix::Result<()> {
    let a = parse_expression_matrix(MRNA, "mrna")?;
    let b = parse_expression_matrix(MIRNA, "mirna")?;
    let clinical = parse_clinical_table(CLINICAL)?;
    let cohort = align_cohort(&a, &b, &clinical)?;
    println!("cohort: {:?}", cohort.sample_ids);
    println!("dropped: {:?}", cohort.report);

    let normalized = normalize_cohort(&cohort, true, true)?;
    let esr1 = normalized.matrix_a.feature_index("ESR1").expect("present");
    println!("ESR1 after log2 + z-score: {:?}", normalized.matrix_a.row(esr1));
    print!("{}", normalized.matrix_b.to_csv());
    Ok(())
}

fn main() {
    run_example().expect("example runs");
}
