use serde::Serialize;

use super::dataset::{ChoiceDataset, ChoiceObs};
use crate::error::{Error, Result};
use crate::rng::GameRng;

/// Upper end of the search interval for `λ`.
pub const LAMBDA_MAX: f64 = 5.0;
pub const MLE_STARTS: usize = 10;
/// Below this `λ̂` the logit likelihood is weakly identified and the prior
/// noticeably moves the posterior.
pub const WEAK_LAMBDA: f64 = 0.2;
const START_SEED: u64 = 0x5EED_1A3B;
const BOUNDARY_TOL: f64 = 1e-6;
const STEP_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 200;
const WALD_Z: f64 = 1.959963984540054;

/// `(log P(chosen), d/dλ, d²/dλ²)` for one observation.
fn obs_terms(o: &ChoiceObs, lambda: f64) -> (f64, f64, f64) {
    // log-partition and moments of U over a set of actions, shifted by its own max
    let moments = |idx: &[usize]| {
        let max = idx.iter().map(|&i| lambda * o.utilities[i]).fold(f64::NEG_INFINITY, f64::max);
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for &i in idx {
            let u = o.utilities[i];
            let w = (lambda * u - max).exp();
            z += w;
            m1 += w * u;
            m2 += w * u * u;
        }
        (max + z.ln(), m1 / z, m2 / z)
    };
    let all: Vec<usize> = (0..o.utilities.len()).collect();
    let (lz_all, e_all, e2_all) = moments(&all);
    let (lz_g, e_g, e2_g) = moments(&o.alternatives[o.chosen]);
    let ll = lz_g - lz_all;
    let var_all = (e2_all - e_all * e_all).max(0.0);
    let var_g = (e2_g - e_g * e_g).max(0.0);
    (ll, e_g - e_all, var_g - var_all)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda {lambda} must be finite and >= 0")));
    }
    Ok(())
}

/// Sum of log logit probabilities of the chosen alternatives.
pub fn loglik(lambda: f64, data: &ChoiceDataset) -> Result<f64> {
    check_lambda(lambda)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset("log-likelihood of an empty dataset".into()));
    }
    Ok(data.obs.iter().map(|o| obs_terms(o, lambda).0).sum())
}

/// Log-likelihood with its first and second derivatives in `λ`.
pub fn loglik_derivatives(lambda: f64, data: &ChoiceDataset) -> Result<(f64, f64, f64)> {
    check_lambda(lambda)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset("log-likelihood of an empty dataset".into()));
    }
    Ok(data.obs.iter().fold((0.0, 0.0, 0.0), |acc, o| {
        let (l, g, h) = obs_terms(o, lambda);
        (acc.0 + l, acc.1 + g, acc.2 + h)
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MleEstimate {
    pub lambda: f64,
    pub neg_log_lik: f64,
    /// Fisher standard error; absent at the boundary.
    pub se: Option<f64>,
    pub ci: Option<(f64, f64)>,
    /// `λ̂ = 0`.
    pub boundary: bool,
    /// At the boundary, the Wald interval reaches 0, or `λ̂ < WEAK_LAMBDA`.
    pub near_boundary: bool,
    /// No observation has utility differences.
    pub unidentified: bool,
    pub n: usize,
}

fn ll(data: &ChoiceDataset, lambda: f64) -> f64 {
    data.obs.iter().map(|o| obs_terms(o, lambda).0).sum()
}

fn golden_section(data: &ChoiceDataset, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (ll(data, c), ll(data, d));
    while b - a > 1e-10 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = ll(data, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = ll(data, d);
        }
    }
    let mid = (a + b) / 2.0;
    // the interval ends are candidates too
    [0.0, mid, LAMBDA_MAX]
        .into_iter()
        .map(|x| (x, ll(data, x)))
        .fold((mid, f64::NEG_INFINITY), |acc, (x, f)| if f > acc.1 { (x, f) } else { acc })
        .0
}

/// Newton-Raphson on `[0, λ_max]` with step halving; golden-section search
/// when the curvature is not negative.
fn newton(data: &ChoiceDataset, start: f64) -> f64 {
    let mut lambda = start;
    for _ in 0..MAX_NEWTON {
        let (f, g, h) = data.obs.iter().fold((0.0, 0.0, 0.0), |acc, o| {
            let (l, g, h) = obs_terms(o, lambda);
            (acc.0 + l, acc.1 + g, acc.2 + h)
        });
        if h >= 0.0 {
            return golden_section(data, 0.0, LAMBDA_MAX);
        }
        let mut step = -g / h;
        let mut next = (lambda + step).clamp(0.0, LAMBDA_MAX);
        let mut halvings = 0;
        while ll(data, next) < f && halvings < 60 {
            step /= 2.0;
            next = (lambda + step).clamp(0.0, LAMBDA_MAX);
            halvings += 1;
        }
        let moved = (next - lambda).abs();
        lambda = next;
        if moved < STEP_TOL {
            break;
        }
    }
    lambda
}

/// Multi-start maximum likelihood for `λ` with Fisher uncertainty.
pub fn mle_lambda(data: &ChoiceDataset) -> Result<MleEstimate> {
    if data.is_empty() {
        return Err(Error::EmptyDataset("MLE on an empty dataset".into()));
    }
    for o in &data.obs {
        o.check()?;
    }
    let n = data.len();
    if data.is_unidentified() {
        return Ok(MleEstimate {
            lambda: 0.0,
            neg_log_lik: -ll(data, 0.0),
            se: None,
            ci: None,
            boundary: true,
            near_boundary: true,
            unidentified: true,
            n,
        });
    }
    let mut rng = GameRng::new(START_SEED);
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for _ in 0..MLE_STARTS {
        let start = LAMBDA_MAX * rng.uniform();
        let lam = newton(data, start);
        let f = ll(data, lam);
        if f > best.1 {
            best = (lam, f);
        }
    }
    let (mut lambda, mut f) = best;
    let boundary = lambda < BOUNDARY_TOL;
    if boundary {
        lambda = 0.0;
        f = ll(data, 0.0);
    }
    let (se, ci) = if boundary {
        (None, None)
    } else {
        let (_, _, h) = loglik_derivatives(lambda, data)?;
        if h < 0.0 {
            let se = 1.0 / (-h).sqrt();
            (Some(se), Some(((lambda - WALD_Z * se).max(0.0), lambda + WALD_Z * se)))
        } else {
            (None, None)
        }
    };
    let near_boundary = boundary || ci.is_some_and(|(lo, _)| lo == 0.0) || lambda < WEAK_LAMBDA;
    Ok(MleEstimate {
        lambda,
        neg_log_lik: -f,
        se,
        ci,
        boundary,
        near_boundary,
        unidentified: false,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::dataset::DecisionKind;
    use crate::types::{AgentId, GameKind};

    fn data(obs: Vec<ChoiceObs>) -> ChoiceDataset {
        ChoiceDataset::new(AgentId::new("x"), GameKind::StrategicClaim, obs)
    }

    fn two_action(chosen: usize) -> ChoiceObs {
        ChoiceObs::plain(1, DecisionKind::Move, vec![1.0, 0.0], chosen, vec![1.0, 0.0])
    }

    #[test]
    fn loglik_examples() {
        let d = data(vec![two_action(0)]);
        let e = std::f64::consts::E;
        assert!((loglik(1.0, &d).unwrap() - (e / (e + 1.0)).ln()).abs() < 1e-15);
        let d3 = data(vec![ChoiceObs::plain(1, DecisionKind::Receiver, vec![3.0, 1.0, 2.0], 2, vec![0.0; 3])]);
        assert!((loglik(0.0, &d3).unwrap() - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!(loglik(-1.0, &d).is_err());
        assert!(loglik(1.0, &data(vec![])).is_err());
    }

    #[test]
    fn no_overflow_at_large_scale() {
        let d = data(vec![ChoiceObs::plain(1, DecisionKind::Move, vec![140.0, -140.0], 1, vec![0.0, 1.0])]);
        let l = loglik(5.0, &d).unwrap();
        assert!((l + 1400.0).abs() < 1e-9);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let d = data(vec![two_action(0), two_action(1), two_action(0)]);
        let h = 1e-5;
        for lam in [0.1, 0.7, 2.0] {
            let (_, g, hh) = loglik_derivatives(lam, &d).unwrap();
            let fd_g = (loglik(lam + h, &d).unwrap() - loglik(lam - h, &d).unwrap()) / (2.0 * h);
            let fd_h = (loglik(lam + h, &d).unwrap() - 2.0 * loglik(lam, &d).unwrap() + loglik(lam - h, &d).unwrap())
                / (h * h);
            assert!((g - fd_g).abs() < 1e-7);
            assert!((hh - fd_h).abs() < 1e-3);
        }
    }

    #[test]
    fn closed_form_two_action_mle() {
        // k successes of n with U = (1, 0): sigmoid(λ) = k/n
        let mut obs = vec![two_action(0); 30];
        obs.extend(vec![two_action(1); 10]);
        let est = mle_lambda(&data(obs)).unwrap();
        assert!((est.lambda - 3.0f64.ln()).abs() < 1e-8);
        assert!(!est.boundary);
        let se = est.se.unwrap();
        // Fisher information n p (1 - p) = 40 * 0.75 * 0.25
        assert!((se - 1.0 / 7.5f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn boundary_suppresses_fisher() {
        let mut obs = vec![two_action(0); 10];
        obs.extend(vec![two_action(1); 15]);
        let est = mle_lambda(&data(obs)).unwrap();
        assert_eq!(est.lambda, 0.0);
        assert!(est.boundary && est.near_boundary);
        assert!(est.se.is_none() && est.ci.is_none());
    }

    #[test]
    fn unidentified_flagged() {
        let obs = vec![ChoiceObs::plain(1, DecisionKind::Move, vec![2.0, 2.0], 0, vec![0.0, 1.0]); 5];
        let est = mle_lambda(&data(obs)).unwrap();
        assert!(est.unidentified);
    }
}
