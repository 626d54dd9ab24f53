use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::bayes::{bayes_lambda, PriorSpec, GRID_STEP};
use super::dataset::ChoiceDataset;
use super::likelihood::mle_lambda;
use crate::error::{Error, Result};

/// One row of the estimate report. Absent values serialize as `null` in
/// JSON and as empty cells in CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaEstimate {
    pub agent: String,
    pub game_kind: String,
    pub n: usize,
    pub lambda_mle: f64,
    pub fisher_se: Option<f64>,
    pub wald_lo: Option<f64>,
    pub wald_hi: Option<f64>,
    pub boundary: bool,
    pub near_boundary: bool,
    pub unidentified: bool,
    pub neg_log_lik: f64,
    pub posterior_mean: Option<f64>,
    pub posterior_sd: Option<f64>,
    pub hdi_lo: Option<f64>,
    pub hdi_hi: Option<f64>,
    /// Posterior mass piles up at the grid edge.
    pub widen_grid: bool,
}

/// MLE and grid posterior for one dataset.
pub fn estimate_agent(data: &ChoiceDataset, prior: PriorSpec) -> Result<LambdaEstimate> {
    let mle = mle_lambda(data)?;
    let (bayes, widen_grid) = match bayes_lambda(data, prior, GRID_STEP) {
        Ok(b) => (Some(b), false),
        Err(Error::WidenGrid { .. }) => (None, true),
        Err(e) => return Err(e),
    };
    Ok(LambdaEstimate {
        agent: data.agent.to_string(),
        game_kind: data.kind.short().to_string(),
        n: mle.n,
        lambda_mle: mle.lambda,
        fisher_se: mle.se,
        wald_lo: mle.ci.map(|c| c.0),
        wald_hi: mle.ci.map(|c| c.1),
        boundary: mle.boundary,
        near_boundary: mle.near_boundary,
        unidentified: mle.unidentified,
        neg_log_lik: mle.neg_log_lik,
        posterior_mean: bayes.as_ref().map(|b| b.mean),
        posterior_sd: bayes.as_ref().map(|b| b.sd),
        hdi_lo: bayes.as_ref().map(|b| b.hdi.0),
        hdi_hi: bayes.as_ref().map(|b| b.hdi.1),
        widen_grid,
    })
}

pub fn write_estimates_csv(rows: &[LambdaEstimate], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_estimates_jsonl(rows: &[LambdaEstimate], path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in rows {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}
