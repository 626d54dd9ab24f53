//! Strategic Claim stage payoffs.
//!
//! Both players send and receive every round. Player `i` challenges the
//! opponent iff the opponent's claim is at least `i`'s threshold; a threshold
//! of 7 never challenges. A player's round payoff is the sum of the sender
//! component (own claim vs. opponent threshold) and the receiver component
//! (own threshold vs. opponent claim).

use crate::error::{Error, Result};
use crate::types::Seat;

pub const ROUNDS: u32 = 10;
pub const MAX_VALUE: u8 = 6;
pub const NEVER_CHALLENGE: u8 = 7;

pub const BLUFF_BONUS: f64 = 2.0;
pub const CAUGHT_BLUFF: f64 = -4.0;
pub const CATCH_REWARD: f64 = 3.0;
pub const FALSE_ACCUSATION: f64 = -2.0;

/// One player's private value and decision for a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScMove {
    pub value: u8,
    pub claim: u8,
    pub threshold: u8,
}

impl ScMove {
    pub fn new(value: u8, claim: u8, threshold: u8) -> Self {
        ScMove { value, claim, threshold }
    }

    pub fn is_bluff(&self) -> bool {
        self.claim > self.value
    }

    pub fn check(&self, seat: Seat) -> Result<()> {
        let reject = |reason: String| Err(Error::RejectedAction { seat, reason });
        if !(1..=MAX_VALUE).contains(&self.value) {
            return reject(format!("value {} outside 1..=6", self.value));
        }
        if self.claim < self.value || self.claim > MAX_VALUE {
            return reject(format!("claim {} outside {}..=6", self.claim, self.value));
        }
        if !(1..=NEVER_CHALLENGE).contains(&self.threshold) {
            return reject(format!("threshold {} outside 1..=7", self.threshold));
        }
        Ok(())
    }
}

/// Whether a receiver with `threshold` challenges `claim`.
pub fn challenges(threshold: u8, claim: u8) -> bool {
    claim >= threshold
}

/// Sender component: honest claims earn `c` whether or not challenged;
/// an unchallenged bluff earns `c + 2`; a caught bluff costs 4.
pub fn sender_payoff(value: u8, claim: u8, challenged: bool) -> f64 {
    let bluff = claim > value;
    match (bluff, challenged) {
        (false, _) => f64::from(claim),
        (true, false) => f64::from(claim) + BLUFF_BONUS,
        (true, true) => CAUGHT_BLUFF,
    }
}

/// Receiver component: +3 for catching a bluff, -2 for challenging an honest
/// claim, 0 when not challenging.
pub fn receiver_payoff(opp_value: u8, opp_claim: u8, challenged: bool) -> f64 {
    match (challenged, opp_claim > opp_value) {
        (false, _) => 0.0,
        (true, true) => CATCH_REWARD,
        (true, false) => FALSE_ACCUSATION,
    }
}

/// Round payoffs `(payoff_a, payoff_b)`.
pub fn sc_round_payoff(a: ScMove, b: ScMove) -> Result<(f64, f64)> {
    a.check(Seat::A)?;
    b.check(Seat::B)?;
    let a_challenged = challenges(b.threshold, a.claim);
    let b_challenged = challenges(a.threshold, b.claim);
    let pa = sender_payoff(a.value, a.claim, a_challenged)
        + receiver_payoff(b.value, b.claim, b_challenged);
    let pb = sender_payoff(b.value, b.claim, b_challenged)
        + receiver_payoff(a.value, a.claim, a_challenged);
    Ok((pa, pb))
}
