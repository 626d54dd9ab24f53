//! Sealed-bid first-price auction control.

use crate::error::{Error, Result};
use crate::types::Seat;

pub const MAX_VALUE: f64 = 100.0;

/// `(payoff_a, payoff_b)`: the high bidder pays its bid; ties split the surplus.
pub fn auction_settle(value_a: f64, bid_a: f64, value_b: f64, bid_b: f64) -> Result<(f64, f64)> {
    for (seat, v, b) in [(Seat::A, value_a, bid_a), (Seat::B, value_b, bid_b)] {
        if !(0.0..=MAX_VALUE).contains(&v) {
            return Err(Error::invalid(format!("seat {seat}: value {v} outside [0, 100]")));
        }
        if !(0.0..=v).contains(&b) {
            return Err(Error::RejectedAction {
                seat,
                reason: format!("bid {b} outside [0, {v}]"),
            });
        }
    }
    Ok(if bid_a > bid_b {
        (value_a - bid_a, 0.0)
    } else if bid_b > bid_a {
        (0.0, value_b - bid_b)
    } else {
        ((value_a - bid_a) / 2.0, (value_b - bid_b) / 2.0)
    })
}

/// Risk-neutral equilibrium bid against one rival with value `U[0, 100]`.
pub fn equilibrium_bid(value: f64) -> f64 {
    value / 2.0
}

/// Probability of winning with `bid` against a rival bidding half of a `U[0, 100]` value.
pub fn win_prob_vs_equilibrium(bid: f64) -> f64 {
    (2.0 * bid / MAX_VALUE).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settle_examples() {
        assert_eq!(auction_settle(80.0, 40.0, 60.0, 30.0).unwrap(), (40.0, 0.0));
        assert_eq!(auction_settle(10.0, 10.0, 90.0, 0.0).unwrap(), (0.0, 0.0));
        assert_eq!(auction_settle(80.0, 30.0, 60.0, 30.0).unwrap(), (25.0, 15.0));
    }

    #[test]
    fn overbid_rejected() {
        assert!(matches!(
            auction_settle(10.0, 11.0, 50.0, 0.0),
            Err(Error::RejectedAction { seat: Seat::A, .. })
        ));
        assert!(auction_settle(10.0, 5.0, 101.0, 0.0).is_err());
    }
}
