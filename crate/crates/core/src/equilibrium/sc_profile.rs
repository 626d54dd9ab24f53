//! Approximate equilibrium of the Strategic Claim stage game.
//!
//! Senders with `v <= 3` bluff to 6 with probability `2 / (8 - v)` and
//! otherwise claim honestly; senders with `v >= 4` are honest. Receivers
//! challenge claims of 5 or more.

use crate::error::{Error, Result};
use crate::games::sc::{self, CATCH_REWARD, FALSE_ACCUSATION, MAX_VALUE, NEVER_CHALLENGE};

pub const EQUILIBRIUM_THRESHOLD: u8 = 5;
pub const BLUFF_CLAIM: u8 = 6;

fn check_value(v: u8) -> Result<()> {
    if !(1..=MAX_VALUE).contains(&v) {
        return Err(Error::invalid(format!("value {v} outside 1..=6")));
    }
    Ok(())
}

/// Bluff probability `β(v) = 2 / (8 - v)` for `v <= 3`, zero otherwise.
pub fn sc_bluff_prob(v: u8) -> Result<f64> {
    check_value(v)?;
    Ok(if v <= 3 { 2.0 / f64::from(8 - v) } else { 0.0 })
}

/// Mean of `β(1..=3)`, the bluff rate given a low value.
pub fn sc_conditional_bluff_rate() -> f64 {
    (2.0 / 7.0 + 2.0 / 6.0 + 2.0 / 5.0) / 3.0
}

/// Posterior that the sender is bluffing when challenge payoffs balance:
/// `3 P(bluff) = 2 P(honest)`.
pub fn indifference_posterior() -> f64 {
    -FALSE_ACCUSATION / (CATCH_REWARD - FALSE_ACCUSATION)
}

/// Joint mass of observed claims, split by whether the claim was a bluff.
/// Index 0 is unused so `honest[c]` is the mass on claim `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimProfile {
    pub honest: [f64; 7],
    pub bluff: [f64; 7],
}

impl ClaimProfile {
    pub fn zero() -> Self {
        ClaimProfile { honest: [0.0; 7], bluff: [0.0; 7] }
    }

    pub fn total(&self) -> f64 {
        self.honest.iter().chain(&self.bluff).sum()
    }

    pub fn normalized(&self) -> ClaimProfile {
        let z = self.total();
        if z <= 0.0 {
            return equilibrium_claim_profile();
        }
        let mut out = self.clone();
        out.honest.iter_mut().chain(out.bluff.iter_mut()).for_each(|x| *x /= z);
        out
    }

    /// `P(bluff | c)`; zero for claims never observed.
    pub fn posterior_bluff(&self, c: u8) -> f64 {
        let c = c as usize;
        let z = self.honest[c] + self.bluff[c];
        if z > 0.0 {
            self.bluff[c] / z
        } else {
            0.0
        }
    }
}

/// Claim distribution induced by the equilibrium sender with uniform values.
pub fn equilibrium_claim_profile() -> ClaimProfile {
    let mut p = ClaimProfile::zero();
    for v in 1..=MAX_VALUE {
        let b = sc_bluff_prob(v).expect("value in range");
        p.honest[v as usize] += (1.0 - b) / 6.0;
        p.bluff[BLUFF_CLAIM as usize] += b / 6.0;
    }
    p
}

/// `P(bluff | c)` under the equilibrium profile. All bluffs land on 6, so
/// claims 4 and 5 are always honest.
pub fn sc_posterior_bluff(c: u8) -> Result<f64> {
    if !(4..=MAX_VALUE).contains(&c) {
        return Err(Error::invalid(format!(
            "claim {c}: the profile never bluffs to claims below 4"
        )));
    }
    Ok(equilibrium_claim_profile().posterior_bluff(c))
}

/// Sender utility for each legal claim `c in v..=6` against challenge
/// frequencies `q[c]` (index 0 unused).
///
/// `U(c) = (1 - q(c)) (c + 2·1[c > v]) + q(c) (-4·1[c > v] + c·1[c = v])`
pub fn sc_expected_utilities(v: u8, q: &[f64; 7]) -> Result<Vec<f64>> {
    check_value(v)?;
    if q.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::invalid("challenge frequencies must lie in [0, 1]"));
    }
    Ok((v..=MAX_VALUE)
        .map(|c| {
            let qc = q[c as usize];
            (1.0 - qc) * sc::sender_payoff(v, c, false) + qc * sc::sender_payoff(v, c, true)
        })
        .collect())
}

/// Receiver utility for each threshold `t in 1..=7` against an opponent claim
/// profile: `U(t) = Σ_{c >= t} 3 f(c, bluff) - 2 f(c, honest)`.
pub fn receiver_utilities(profile: &ClaimProfile) -> [f64; 7] {
    let p = profile.normalized();
    let mut u = [0.0; 7];
    for t in 1..=NEVER_CHALLENGE {
        u[(t - 1) as usize] = (t..=MAX_VALUE)
            .map(|c| CATCH_REWARD * p.bluff[c as usize] + FALSE_ACCUSATION * p.honest[c as usize])
            .sum();
    }
    u
}

/// Challenge frequency per claim under a deterministic threshold.
pub fn threshold_challenge_freq(threshold: u8) -> [f64; 7] {
    let mut q = [0.0; 7];
    for c in 1..=MAX_VALUE {
        q[c as usize] = if c >= threshold { 1.0 } else { 0.0 };
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bluff_probabilities() {
        assert!((sc_bluff_prob(1).unwrap() - 2.0 / 7.0).abs() < 1e-15);
        assert!((sc_bluff_prob(1).unwrap() - 0.286).abs() < 5e-4);
        assert!((sc_bluff_prob(3).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(sc_bluff_prob(5).unwrap(), 0.0);
        assert!(sc_bluff_prob(0).is_err());
        assert!(sc_bluff_prob(7).is_err());
    }

    #[test]
    fn conditional_rate_is_mean_of_low_values() {
        let mean = (1..=3).map(|v| sc_bluff_prob(v).unwrap()).sum::<f64>() / 3.0;
        assert!((sc_conditional_bluff_rate() - mean).abs() < 1e-15);
        assert_eq!((sc_conditional_bluff_rate() * 1000.0).round() / 1000.0, 0.340);
    }

    #[test]
    fn posterior_at_six_and_gap() {
        let p = sc_posterior_bluff(6).unwrap();
        assert!((p - 214.0 / 424.0).abs() < 1e-12);
        assert!((indifference_posterior() - 0.4).abs() < 1e-15);
        assert!(((p - indifference_posterior()) - 0.105).abs() < 1e-3);
        assert_eq!(sc_posterior_bluff(4).unwrap(), 0.0);
        assert!(sc_posterior_bluff(3).is_err());
    }

    #[test]
    fn expected_utility_examples() {
        let u = sc_expected_utilities(6, &[0.0; 7]).unwrap();
        assert_eq!(u, vec![6.0]);

        let u = sc_expected_utilities(1, &[0.0; 7]).unwrap();
        assert_eq!(u, vec![1.0, 4.0, 5.0, 6.0, 7.0, 8.0]);

        let mut q = [0.0; 7];
        q[6] = 1.0;
        let u = sc_expected_utilities(1, &q).unwrap();
        assert_eq!(u[5], -4.0);
        let argmax = u.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(argmax + 1, 5);
    }

    #[test]
    fn threshold_five_deviation_gain() {
        // v = 1 against threshold 5: claiming 4 goes unchallenged for 6 points,
        // while the profile's mix earns 5/7·1 + 2/7·(-4).
        let u = sc_expected_utilities(1, &threshold_challenge_freq(5)).unwrap();
        assert_eq!(u[3], 6.0);
        let profile = 5.0 / 7.0 * u[0] + 2.0 / 7.0 * u[5];
        assert!((profile - (-3.0 / 7.0)).abs() < 1e-12);
        assert!((u[3] - profile - 6.43).abs() < 0.01);
    }

    #[test]
    fn receiver_utilities_never_challenge_is_zero() {
        let u = receiver_utilities(&equilibrium_claim_profile());
        assert_eq!(u[6], 0.0);
        // Challenging only sixes pays 3·P(6, bluff) - 2·P(6, honest) > 0.
        assert!(u[5] > 0.0);
    }
}
