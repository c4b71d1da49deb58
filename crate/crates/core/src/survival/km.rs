use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ClinicalTable;

/// One drop of the product-limit curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalStep {
    pub time: f64,
    pub n_at_risk: usize,
    pub events: usize,
    /// S(t) just after this step.
    pub survival: f64,
    /// Greenwood variance of S(t).
    pub variance: f64,
    /// False once a step with `events == n_at_risk` has been passed; its
    /// Greenwood term is infinite and was left out of `variance`.
    pub variance_finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub label: String,
    pub steps: Vec<SurvivalStep>,
    pub censor_times: Vec<f64>,
    pub n_total: usize,
}

impl SurvivalCurve {
    /// S(t) as a right-continuous step function.
    pub fn survival_at(&self, t: f64) -> f64 {
        self.steps
            .iter()
            .take_while(|s| s.time <= t)
            .last()
            .map_or(1.0, |s| s.survival)
    }

    /// `time,n_at_risk,events,survival,variance` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,n_at_risk,events,survival,variance\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.time, s.n_at_risk, s.events, s.survival, s.variance
            ));
        }
        out
    }
}

/// (time, event) pairs for the given samples.
pub(crate) fn observations(samples: &[String], clinical: &ClinicalTable) -> Result<Vec<(f64, bool)>> {
    samples
        .iter()
        .map(|id| {
            clinical
                .get(id)
                .map(|r| (r.survival_time, r.event))
                .ok_or_else(|| Error::UnknownSample(id.clone()))
        })
        .collect()
}

/// Kaplan-Meier product-limit estimate over `samples`. At tied times,
/// events are counted before censorings, so subjects censored at `t`
/// are still at risk for the events at `t`.
pub fn km_curve(label: &str, samples: &[String], clinical: &ClinicalTable) -> Result<SurvivalCurve> {
    if samples.is_empty() {
        return Err(Error::EmptyGroup(label.to_string()));
    }
    let mut obs = observations(samples, clinical)?;
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut steps = Vec::new();
    let mut censor_times = Vec::new();
    let mut at_risk = obs.len();
    let mut survival = 1.0;
    let mut greenwood = 0.0;
    let mut finite = true;
    let mut censored_so_far = false;
    let mut i = 0;
    while i < obs.len() {
        let t = obs[i].0;
        let mut events = 0;
        let mut censored = 0;
        while i < obs.len() && obs[i].0 == t {
            if obs[i].1 {
                events += 1;
            } else {
                censored += 1;
                censor_times.push(t);
            }
            i += 1;
        }
        if events > 0 {
            survival = if censored_so_far {
                survival * (1.0 - events as f64 / at_risk as f64)
            } else {
                // uncensored prefix: the product telescopes to a single ratio
                (at_risk - events) as f64 / obs.len() as f64
            };
            if events < at_risk {
                greenwood += events as f64 / (at_risk as f64 * (at_risk - events) as f64);
            } else {
                finite = false;
            }
            steps.push(SurvivalStep {
                time: t,
                n_at_risk: at_risk,
                events,
                survival,
                variance: survival * survival * greenwood,
                variance_finite: finite,
            });
        }
        at_risk -= events + censored;
        censored_so_far |= censored > 0;
    }
    Ok(SurvivalCurve {
        label: label.to_string(),
        steps,
        censor_times,
        n_total: obs.len(),
    })
}
