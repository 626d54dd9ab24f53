use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::dataset::ChoiceDataset;
use super::likelihood::{loglik, LAMBDA_MAX};
use crate::error::{Error, Result};

pub const GRID_STEP: f64 = 0.005;
const HDI_MASS: f64 = 0.95;

/// Gamma prior with shape `k` and rate `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PriorSpec {
    pub shape: f64,
    pub rate: f64,
}

impl PriorSpec {
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
            return Err(Error::invalid(format!("Gamma({shape}, {rate}) needs shape > 0 and rate > 0")));
        }
        Ok(PriorSpec { shape, rate })
    }

    /// The default reference prior, Gamma(2, 1).
    pub fn reference() -> Self {
        PriorSpec { shape: 2.0, rate: 1.0 }
    }

    /// Gamma(1, 0.5), Gamma(2, 1), Gamma(3, 1).
    pub fn sensitivity_set() -> Vec<PriorSpec> {
        vec![
            PriorSpec { shape: 1.0, rate: 0.5 },
            PriorSpec { shape: 2.0, rate: 1.0 },
            PriorSpec { shape: 3.0, rate: 1.0 },
        ]
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if x == 0.0 {
            return match self.shape {
                s if s < 1.0 => f64::INFINITY,
                1.0 => self.rate.ln(),
                _ => f64::NEG_INFINITY,
            };
        }
        self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln() - self.rate * x
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BayesEstimate {
    pub prior: PriorSpec,
    pub mean: f64,
    pub sd: f64,
    pub hdi: (f64, f64),
    /// Grid point with the largest posterior density.
    pub mode: f64,
    /// Normalized posterior density on the grid.
    #[serde(skip)]
    pub grid: Vec<(f64, f64)>,
}

fn trapezoid(xs: &[f64], h: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    h * (xs.iter().sum::<f64>() - 0.5 * (xs[0] + xs[xs.len() - 1]))
}

/// Grid posterior on `[0, λ_max]` with spacing `step`.
pub fn bayes_lambda(data: &ChoiceDataset, prior: PriorSpec, step: f64) -> Result<BayesEstimate> {
    bayes_lambda_on(data, prior, step, LAMBDA_MAX)
}

pub fn bayes_lambda_on(data: &ChoiceDataset, prior: PriorSpec, step: f64, lambda_max: f64) -> Result<BayesEstimate> {
    if !(step > 0.0 && step < lambda_max) {
        return Err(Error::invalid(format!("grid step {step} must lie in (0, {lambda_max})")));
    }
    PriorSpec::gamma(prior.shape, prior.rate)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset("posterior on an empty dataset".into()));
    }
    let points = (lambda_max / step).round() as usize + 1;
    let grid: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
    let mut logpost: Vec<f64> = grid
        .iter()
        .map(|&x| Ok(loglik(x, data)? + prior.ln_pdf(x)))
        .collect::<Result<_>>()?;
    // An infinite density at 0 (shape < 1) is replaced by its neighbour's
    // value so the trapezoid rule stays finite.
    if logpost[0] == f64::INFINITY {
        logpost[0] = logpost[1];
    }
    let max = logpost.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut dens: Vec<f64> = logpost.iter().map(|l| (l - max).exp()).collect();
    let z = trapezoid(&dens, step);
    dens.iter_mut().for_each(|d| *d /= z);

    let mode_idx = dens
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc })
        .0;
    if mode_idx == points - 1 {
        return Err(Error::WidenGrid { lambda_max });
    }

    let xd: Vec<f64> = grid.iter().zip(&dens).map(|(x, d)| x * d).collect();
    let mean = trapezoid(&xd, step);
    let x2d: Vec<f64> = grid.iter().zip(&dens).map(|(x, d)| (x - mean).powi(2) * d).collect();
    let sd = trapezoid(&x2d, step).sqrt();

    // Highest-density cells until the mass reaches 95%.
    let mut cells: Vec<(usize, f64)> = (0..points - 1)
        .map(|i| (i, step * (dens[i] + dens[i + 1]) / 2.0))
        .collect();
    cells.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut mass = 0.0;
    let (mut lo, mut hi) = (usize::MAX, 0);
    for &(i, m) in &cells {
        mass += m;
        lo = lo.min(i);
        hi = hi.max(i + 1);
        if mass >= HDI_MASS {
            break;
        }
    }
    Ok(BayesEstimate {
        prior,
        mean,
        sd,
        hdi: (grid[lo], grid[hi]),
        mode: grid[mode_idx],
        grid: grid.into_iter().zip(dens).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PriorSensitivity {
    pub rows: Vec<BayesEstimate>,
    /// Max minus min posterior mean across priors.
    pub range: f64,
}

pub fn prior_sensitivity(data: &ChoiceDataset, priors: &[PriorSpec]) -> Result<PriorSensitivity> {
    if priors.len() < 2 {
        return Err(Error::invalid("prior sensitivity needs at least two priors"));
    }
    let rows = priors
        .iter()
        .map(|&p| bayes_lambda(data, p, GRID_STEP))
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let range = means.iter().copied().fold(f64::NEG_INFINITY, f64::max) - means.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PriorSensitivity { rows, range })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::dataset::{ChoiceObs, DecisionKind};
    use crate::types::{AgentId, GameKind};

    fn flat_data() -> ChoiceDataset {
        let obs = vec![ChoiceObs::plain(1, DecisionKind::Move, vec![1.0, 1.0], 0, vec![0.0, 1.0]); 20];
        ChoiceDataset::new(AgentId::new("x"), GameKind::RepeatedPD, obs)
    }

    /// Mean of Gamma(k, θ) truncated to [0, b] by fine midpoint quadrature.
    fn truncated_mean(p: PriorSpec, b: f64) -> f64 {
        let m = 200_000;
        let h = b / m as f64;
        let (mut z, mut s) = (0.0, 0.0);
        for i in 0..m {
            let x = (i as f64 + 0.5) * h;
            let d = p.ln_pdf(x).exp();
            z += d;
            s += x * d;
        }
        s / z
    }

    #[test]
    fn flat_likelihood_returns_the_truncated_prior() {
        for p in PriorSpec::sensitivity_set() {
            let est = bayes_lambda(&flat_data(), p, GRID_STEP).unwrap();
            let oracle = truncated_mean(p, LAMBDA_MAX);
            assert!((est.mean - oracle).abs() < 2e-3, "{p:?}: {} vs {oracle}", est.mean);
        }
        // Gamma(2, 1) on [0, 5]: 2 P(Gamma(3,1) < 5) / P(Gamma(2,1) < 5)
        let e5 = (-5.0f64).exp();
        let closed = 2.0 * (1.0 - e5 * 18.5) / (1.0 - e5 * 6.0);
        let est = bayes_lambda(&flat_data(), PriorSpec::reference(), GRID_STEP).unwrap();
        assert!((est.mean - closed).abs() < 1e-4);
    }

    #[test]
    fn identical_priors_have_zero_range() {
        let p = PriorSpec::reference();
        assert_eq!(prior_sensitivity(&flat_data(), &[p, p]).unwrap().range, 0.0);
        assert!(prior_sensitivity(&flat_data(), &[p]).is_err());
    }

    #[test]
    fn hdi_contains_the_mass() {
        let est = bayes_lambda(&flat_data(), PriorSpec::reference(), GRID_STEP).unwrap();
        let mass: f64 = est
            .grid
            .windows(2)
            .filter(|w| w[0].0 >= est.hdi.0 - 1e-12 && w[1].0 <= est.hdi.1 + 1e-12)
            .map(|w| GRID_STEP * (w[0].1 + w[1].1) / 2.0)
            .sum();
        assert!((0.95..0.96).contains(&mass));
        // Gamma(2,1) mode is 1
        assert!((est.mode - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mass_at_the_edge_asks_for_a_wider_grid() {
        let obs = vec![ChoiceObs::plain(1, DecisionKind::Move, vec![0.1, 0.0], 0, vec![1.0, 0.0]); 200];
        let d = ChoiceDataset::new(AgentId::new("x"), GameKind::RepeatedPD, obs);
        assert!(matches!(
            bayes_lambda(&d, PriorSpec::reference(), GRID_STEP),
            Err(Error::WidenGrid { .. })
        ));
    }

    #[test]
    fn bad_inputs() {
        assert!(PriorSpec::gamma(0.0, 1.0).is_err());
        assert!(bayes_lambda(&flat_data(), PriorSpec::reference(), 0.0).is_err());
    }
}
