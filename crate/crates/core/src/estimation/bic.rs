use serde::Serialize;

use super::dataset::ChoiceDataset;
use super::likelihood::mle_lambda;
use crate::error::{Error, Result};

/// Probability floor for outcomes the equilibrium model rules out.
pub const NASH_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BicModel {
    Qre,
    Nash,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BicEntry {
    pub model: BicModel,
    /// Free parameters.
    pub k: usize,
    pub log_lik: f64,
    pub bic: f64,
    pub weight: f64,
    /// `λ̂` for the QRE row.
    pub lambda: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BicReport {
    pub n: usize,
    pub entries: Vec<BicEntry>,
    pub winner: BicModel,
}

impl BicReport {
    pub fn entry(&self, model: BicModel) -> &BicEntry {
        self.entries.iter().find(|e| e.model == model).expect("all models present")
    }

    /// BIC of `other` minus BIC of the winner.
    pub fn margin_over(&self, other: BicModel) -> f64 {
        self.entry(other).bic - self.entry(self.winner).bic
    }
}

/// BIC comparison of QRE (k = 1, at the MLE), Nash and Random (k = 0).
pub fn bic_compare(data: &ChoiceDataset) -> Result<BicReport> {
    let n = data.len();
    if n < 2 {
        return Err(Error::invalid(format!("BIC comparison needs n >= 2, got {n}")));
    }
    let mle = mle_lambda(data)?;
    let ll_qre = -mle.neg_log_lik;
    let ll_nash: f64 = data.obs.iter().map(|o| o.nash[o.chosen].max(NASH_FLOOR).ln()).sum();
    let ll_random: f64 = data.obs.iter().map(|o| -(o.alternatives.len() as f64).ln()).sum();
    let ln_n = (n as f64).ln();
    let mut entries = vec![
        BicEntry {
            model: BicModel::Qre,
            k: 1,
            log_lik: ll_qre,
            bic: ln_n - 2.0 * ll_qre,
            weight: 0.0,
            lambda: Some(mle.lambda),
        },
        BicEntry {
            model: BicModel::Nash,
            k: 0,
            log_lik: ll_nash,
            bic: -2.0 * ll_nash,
            weight: 0.0,
            lambda: None,
        },
        BicEntry {
            model: BicModel::Random,
            k: 0,
            log_lik: ll_random,
            bic: -2.0 * ll_random,
            weight: 0.0,
            lambda: None,
        },
    ];
    let best = entries.iter().map(|e| e.bic).fold(f64::INFINITY, f64::min);
    let z: f64 = entries.iter().map(|e| (-(e.bic - best) / 2.0).exp()).sum();
    for e in &mut entries {
        e.weight = (-(e.bic - best) / 2.0).exp() / z;
    }
    let winner = entries
        .iter()
        .fold(&entries[0], |a, e| if e.bic < a.bic { e } else { a })
        .model;
    Ok(BicReport { n, entries, winner })
}
