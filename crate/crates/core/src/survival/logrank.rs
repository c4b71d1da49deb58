use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::chisq::chi_square_sf;
use super::km::observations;
use crate::error::{Error, Result};
use crate::ingest::ClinicalTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRankResult {
    pub labels: Vec<String>,
    pub observed: Vec<f64>,
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub degrees_of_freedom: u32,
    pub p_value: f64,
    /// Hypergeometric variance of `O_1 − E_1`; only for two groups.
    pub variance: Option<f64>,
}

/// A named group of samples.
pub type Group = (String, Vec<String>);

/// Ids occurring in more than one group, sorted.
pub(crate) fn shared_ids(groups: &[Group]) -> Vec<String> {
    let mut owner: HashMap<&str, usize> = HashMap::new();
    let mut shared = BTreeSet::new();
    for (g, (_, ids)) in groups.iter().enumerate() {
        for id in ids {
            if let Some(&prev) = owner.get(id.as_str()) {
                if prev != g {
                    shared.insert(id.clone());
                }
            } else {
                owner.insert(id, g);
            }
        }
    }
    shared.into_iter().collect()
}

/// Log-rank comparison of two or more disjoint groups.
///
/// Two groups use the exact variance-weighted statistic
/// `(O_1 − E_1)² / V`; more groups use `Σ (O_g − E_g)² / E_g`.
pub fn logrank(groups: &[Group], clinical: &ClinicalTable) -> Result<LogRankResult> {
    let g_count = groups.len();
    if g_count < 2 {
        return Err(Error::TooFewGroups(g_count));
    }
    if let Some((label, _)) = groups.iter().find(|(_, ids)| ids.is_empty()) {
        return Err(Error::EmptyGroup(label.clone()));
    }
    let shared = shared_ids(groups);
    if !shared.is_empty() {
        return Err(Error::OverlappingGroups(shared));
    }
    let mut pooled: Vec<(f64, bool, usize)> = Vec::new();
    for (g, (_, ids)) in groups.iter().enumerate() {
        pooled.extend(observations(ids, clinical)?.into_iter().map(|(t, e)| (t, e, g)));
    }
    if !pooled.iter().any(|o| o.1) {
        return Err(Error::NoEvents);
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut at_risk: Vec<usize> = groups.iter().map(|(_, ids)| ids.len()).collect();
    let mut observed = vec![0.0; g_count];
    let mut expected = vec![0.0; g_count];
    let mut variance = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let t = pooled[i].0;
        let mut events = vec![0usize; g_count];
        let mut leaving = vec![0usize; g_count];
        while i < pooled.len() && pooled[i].0 == t {
            let (_, e, g) = pooled[i];
            if e {
                events[g] += 1;
            }
            leaving[g] += 1;
            i += 1;
        }
        let d: usize = events.iter().sum();
        if d > 0 {
            let n: usize = at_risk.iter().sum();
            let (nf, df) = (n as f64, d as f64);
            for g in 0..g_count {
                observed[g] += events[g] as f64;
                expected[g] += df * at_risk[g] as f64 / nf;
            }
            if g_count == 2 && n > 1 {
                let pair = at_risk[0] as f64 * at_risk[1] as f64;
                variance += df * (nf - df) * pair / (nf * nf * (nf - 1.0));
            }
        }
        for g in 0..g_count {
            at_risk[g] -= leaving[g];
        }
    }

    if expected.iter().all(|&e| e == 0.0) {
        return Err(Error::ZeroExpected);
    }
    let statistic = if g_count == 2 {
        // O_1 − E_1 = −(O_2 − E_2); averaging both keeps the result
        // bit-identical when the groups are swapped
        let diff = ((observed[0] - expected[0]) - (observed[1] - expected[1])) / 2.0;
        if variance > 0.0 {
            diff * diff / variance
        } else if diff.abs() < 1e-12 {
            0.0
        } else {
            return Err(Error::ZeroVariance);
        }
    } else {
        observed
            .iter()
            .zip(&expected)
            .filter(|(_, &e)| e > 0.0)
            .map(|(o, e)| (o - e).powi(2) / e)
            .sum()
    };
    let degrees_of_freedom = (g_count - 1) as u32;
    Ok(LogRankResult {
        labels: groups.iter().map(|(l, _)| l.clone()).collect(),
        observed,
        expected,
        statistic,
        degrees_of_freedom,
        p_value: chi_square_sf(statistic, degrees_of_freedom)?,
        variance: (g_count == 2).then_some(variance),
    })
}
