//! Repeated Prisoner's Dilemma with cheap talk.

use crate::error::{Error, Result};
use crate::record::Move;

/// Stage payoffs (T, R, P, S).
pub const TEMPTATION: f64 = 5.0;
pub const REWARD: f64 = 3.0;
pub const PUNISHMENT: f64 = 1.0;
pub const SUCKER: f64 = 0.0;
pub const T_MAX: u32 = 15;

/// Stage payoffs `(payoff_a, payoff_b)`. Messages carry no payoff.
pub fn rpd_payoff(a: Move, b: Move) -> (f64, f64) {
    match (a, b) {
        (Move::C, Move::C) => (REWARD, REWARD),
        (Move::C, Move::D) => (SUCKER, TEMPTATION),
        (Move::D, Move::C) => (TEMPTATION, SUCKER),
        (Move::D, Move::D) => (PUNISHMENT, PUNISHMENT),
    }
}

/// Round-dependent continuation probability `(15 - t) / (16 - t)`.
pub fn rpd_continuation(t: u32) -> Result<f64> {
    if !(1..=T_MAX).contains(&t) {
        return Err(Error::invalid(format!("round {t} outside 1..=15")));
    }
    Ok(f64::from(T_MAX - t) / f64::from(T_MAX + 1 - t))
}

/// Expected stage utilities `(U(C), U(D))` against an opponent cooperating
/// with probability `p`.
pub fn stage_utilities(p: f64) -> (f64, f64) {
    (REWARD * p + SUCKER * (1.0 - p), TEMPTATION * p + PUNISHMENT * (1.0 - p))
}
