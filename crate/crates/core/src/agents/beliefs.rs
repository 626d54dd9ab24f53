//! Opponent models built from the current game's history.

use crate::agents::synthetic::smoothing_update;
use crate::equilibrium::{equilibrium_claim_profile, threshold_challenge_freq, ClaimProfile, EQUILIBRIUM_THRESHOLD};
use crate::games::sc::MAX_VALUE;
use crate::record::{Action, Move, PrivateState, RoundRecord};
use crate::types::Seat;

/// Empirical opponent statistics. Before any history exists the statistics
/// sit at the equilibrium profile.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefState {
    /// `q[c]`: frequency with which the opponent challenges claim `c`.
    pub challenge_freq: [f64; 7],
    /// Opponent claim mass split by honest/bluff (values are revealed after each round).
    pub opponent_claims: ClaimProfile,
    /// Opponent cooperation frequency in RPD.
    pub cooperation: f64,
}

impl BeliefState {
    pub fn equilibrium() -> Self {
        BeliefState {
            challenge_freq: threshold_challenge_freq(EQUILIBRIUM_THRESHOLD),
            opponent_claims: equilibrium_claim_profile(),
            // Subgame-perfect play defects throughout.
            cooperation: 0.0,
        }
    }

    /// Beliefs of the player in `seat` after observing `history`.
    pub fn from_history(seat: Seat, history: &[RoundRecord]) -> Self {
        let mut b = BeliefState::equilibrium();
        let opp = seat.other().index();

        let mut thresholds = Vec::new();
        let mut claims = ClaimProfile::zero();
        let mut moves = 0usize;
        let mut coops = 0usize;
        for r in history {
            match (&r.actions[opp], &r.private[opp]) {
                (Action::Claim { claim, threshold }, PrivateState::Value { value }) => {
                    thresholds.push(*threshold);
                    if claim > value {
                        claims.bluff[*claim as usize] += 1.0;
                    } else {
                        claims.honest[*claim as usize] += 1.0;
                    }
                }
                (Action::Move { mv, .. }, _) => {
                    moves += 1;
                    coops += usize::from(*mv == Move::C);
                }
                _ => {}
            }
        }
        if !thresholds.is_empty() {
            let n = thresholds.len() as f64;
            for c in 1..=MAX_VALUE {
                b.challenge_freq[c as usize] = thresholds.iter().filter(|&&t| t <= c).count() as f64 / n;
            }
            b.opponent_claims = claims.normalized();
        }
        if moves > 0 {
            b.cooperation = coops as f64 / moves as f64;
        }
        b
    }
}

/// Smoothed estimate of the opponent's bluff rate given a low value.
///
/// Rounds where the opponent held `v >= 4` carry no information about that
/// rate and leave the estimate unchanged.
pub fn smoothed_bluff_belief(seat: Seat, history: &[RoundRecord], eta: f64, initial: f64) -> f64 {
    let opp = seat.other().index();
    history.iter().fold(initial, |belief, r| match (&r.actions[opp], &r.private[opp]) {
        (Action::Claim { claim, .. }, PrivateState::Value { value }) if *value <= 3 => {
            smoothing_update(belief, claim > value, eta)
        }
        _ => belief,
    })
}
