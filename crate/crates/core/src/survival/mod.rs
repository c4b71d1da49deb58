//! Kaplan-Meier curves, log-rank comparison and the chi-square tail used
//! for its p-value.

mod chisq;
mod km;
mod logrank;

pub use chisq::{chi_square_sf, gamma_q, ln_gamma};
pub use km::{km_curve, SurvivalCurve, SurvivalStep};
pub use logrank::{logrank, Group, LogRankResult};

pub(crate) use logrank::shared_ids;
