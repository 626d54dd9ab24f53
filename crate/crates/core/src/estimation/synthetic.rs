//! Choice data from agents with known rationality facing the equilibrium
//! opponent, the ground truth for estimator recovery checks.

use super::dataset::{nash_claims, nash_thresholds, receiver_obs, sender_obs, ChoiceDataset, DatasetOptions};
use crate::equilibrium::{
    equilibrium_claim_profile, logit, receiver_utilities, sc_expected_utilities, threshold_challenge_freq,
    EQUILIBRIUM_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::games::sc::{MAX_VALUE, NEVER_CHALLENGE};
use crate::rng::GameRng;
use crate::types::{AgentId, GameKind};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator {
    Qre(f64),
    Nash,
    Random,
}

impl Generator {
    fn claim_index(&self, v: u8, q: &[f64; 7], rng: &mut GameRng) -> usize {
        match *self {
            Generator::Qre(lambda) => rng.categorical(&logit(&sc_expected_utilities(v, q).expect("legal value"), lambda)),
            Generator::Nash => rng.categorical(&nash_claims(v)),
            Generator::Random => {
                if v < MAX_VALUE && rng.bernoulli(0.5) {
                    rng.int_inclusive(1, i64::from(MAX_VALUE - v)) as usize
                } else {
                    0
                }
            }
        }
    }

    fn threshold(&self, receiver_u: &[f64], rng: &mut GameRng) -> u8 {
        match *self {
            Generator::Qre(lambda) => 1 + rng.categorical(&logit(receiver_u, lambda)) as u8,
            Generator::Nash => 1 + rng.categorical(&nash_thresholds()) as u8,
            Generator::Random => rng.int_inclusive(1, i64::from(NEVER_CHALLENGE)) as u8,
        }
    }
}

/// `n` SC observations alternating sender and receiver decisions (sender
/// only when `opts.sender_only`), with values uniform on `1..=6`.
pub fn synthetic_dataset(generator: Generator, n: usize, seed: u64, opts: DatasetOptions) -> Result<ChoiceDataset> {
    if n == 0 {
        return Err(Error::invalid("synthetic dataset size must be >= 1"));
    }
    if let Generator::Qre(l) = generator {
        if !(l >= 0.0 && l.is_finite()) {
            return Err(Error::invalid(format!("lambda {l} must be finite and >= 0")));
        }
    }
    let q = threshold_challenge_freq(EQUILIBRIUM_THRESHOLD);
    let profile = equilibrium_claim_profile();
    let receiver_u = receiver_utilities(&profile);
    let mut rng = GameRng::new(seed);
    let mut obs = Vec::with_capacity(n);
    let mut round = 0u32;
    while obs.len() < n {
        round += 1;
        let v = rng.int_inclusive(1, i64::from(MAX_VALUE)) as u8;
        let k = generator.claim_index(v, &q, &mut rng);
        if !(opts.binarize && v > 3) {
            obs.push(sender_obs(round, v, &q, k, opts.binarize));
        }
        if !opts.sender_only && obs.len() < n {
            let t = generator.threshold(&receiver_u, &mut rng);
            obs.push(receiver_obs(round, &profile, t));
        }
    }
    let name = match generator {
        Generator::Qre(l) => format!("qre-{l}"),
        Generator::Nash => "nash".into(),
        Generator::Random => "random".into(),
    };
    Ok(ChoiceDataset::new(AgentId::new(name), GameKind::StrategicClaim, obs))
}
