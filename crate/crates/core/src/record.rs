//! Persistent per-game records and their validator.

use serde::{Deserialize, Serialize};

use crate::conditions::{RPD_MAX_HORIZON, RPD_MIN_HORIZON};
use crate::games::{dixit, sc, stst};
use crate::types::{AgentId, Axis, GameKind, Seat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    WinA,
    WinB,
    Draw,
}

impl Outcome {
    /// Score comparison: the higher total wins, equal totals draw.
    pub fn from_scores(score_a: f64, score_b: f64) -> Outcome {
        if score_a > score_b {
            Outcome::WinA
        } else if score_b > score_a {
            Outcome::WinB
        } else {
            Outcome::Draw
        }
    }

    /// ELO score for seat A: 1, 0 or 0.5.
    pub fn score_a(self) -> f64 {
        match self {
            Outcome::WinA => 1.0,
            Outcome::WinB => 0.0,
            Outcome::Draw => 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    C,
    D,
}

/// Information only one player sees before acting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PrivateState {
    None,
    Value { value: u8 },
    AuctionValue { value: f64 },
    Target { target: u8 },
}

/// A player's action in one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    Claim { claim: u8, threshold: u8 },
    Move {
        #[serde(rename = "move")]
        mv: Move,
        #[serde(default)]
        message: String,
    },
    Word { word: String },
    Story { clue: Vec<String>, predicted_confidence: f64 },
    Guess { guess: u8, confidence: f64 },
    Bid { bid: f64 },
    /// Protocol failure after the retry budget; ends the game.
    Forfeit,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundFlags {
    #[serde(default)]
    pub bluffed: [bool; 2],
    #[serde(default)]
    pub challenged: [bool; 2],
    #[serde(default)]
    pub cooperated: [bool; 2],
    #[serde(default)]
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: u32,
    pub private: [PrivateState; 2],
    pub actions: [Action; 2],
    pub payoffs: [f64; 2],
    #[serde(default)]
    pub flags: RoundFlags,
    /// STST semantic distance `1 - similarity` between the two words.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forfeit: Option<Seat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub game_kind: GameKind,
    pub axis: Axis,
    pub condition_index: usize,
    pub agent_a: AgentId,
    pub agent_b: AgentId,
    pub seed: u64,
    pub rounds: Vec<RoundRecord>,
    pub score_a: f64,
    pub score_b: f64,
    pub outcome: Outcome,
}

/// A failed invariant, located by round (0 for record-level problems).
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub round: u32,
    pub message: String,
}

impl GameRecord {
    pub fn agent(&self, seat: Seat) -> &AgentId {
        match seat {
            Seat::A => &self.agent_a,
            Seat::B => &self.agent_b,
        }
    }

    pub fn score(&self, seat: Seat) -> f64 {
        match seat {
            Seat::A => self.score_a,
            Seat::B => self.score_b,
        }
    }

    pub fn is_self_play(&self) -> bool {
        self.agent_a == self.agent_b
    }

    pub fn forfeited(&self) -> Option<Seat> {
        self.rounds.last().and_then(|r| r.forfeit)
    }

    /// Seats occupied by `agent` (both seats in self-play).
    pub fn seats_of(&self, agent: &AgentId) -> Vec<Seat> {
        [Seat::A, Seat::B]
            .into_iter()
            .filter(|&s| self.agent(s) == agent)
            .collect()
    }

    /// Checks every record-level and round-level invariant.
    pub fn validate(&self) -> Result<(), Violation> {
        let fail = |round: u32, message: String| Err(Violation { round, message });

        if self.axis != self.game_kind.axis() {
            return fail(0, format!("axis {} does not match {:?}", self.axis, self.game_kind));
        }
        let n = self.rounds.len() as u32;
        let forfeit = self.forfeited().is_some();
        let horizon_ok = match self.game_kind {
            GameKind::StrategicClaim => n == sc::ROUNDS || (forfeit && n <= sc::ROUNDS),
            GameKind::RepeatedPD => {
                (RPD_MIN_HORIZON..=RPD_MAX_HORIZON).contains(&n) || (forfeit && n <= RPD_MAX_HORIZON)
            }
            GameKind::SayTheSameThing => (1..=stst::MAX_ROUNDS).contains(&n),
            GameKind::TextDixit => n == dixit::ROUNDS || (forfeit && n <= dixit::ROUNDS),
            GameKind::Auction => n == 1,
        };
        if !horizon_ok {
            return fail(0, format!("{n} rounds violates the {:?} horizon", self.game_kind));
        }

        for (i, r) in self.rounds.iter().enumerate() {
            if r.round != i as u32 + 1 {
                return fail(r.round, format!("round index {} out of sequence", r.round));
            }
            if r.forfeit.is_some() && i + 1 != self.rounds.len() {
                return fail(r.round, "forfeit must end the game".into());
            }
            if r.payoffs.iter().any(|p| !p.is_finite()) {
                return fail(r.round, "non-finite payoff".into());
            }
            if let Err(m) = validate_round(self.game_kind, r) {
                return fail(r.round, m);
            }
        }

        let (sa, sb) = self.round_payoff_sums();
        if sa != self.score_a || sb != self.score_b {
            return fail(
                0,
                format!(
                    "scores ({}, {}) differ from round payoff sums ({sa}, {sb})",
                    self.score_a, self.score_b
                ),
            );
        }
        if self.outcome != Outcome::from_scores(self.score_a, self.score_b) {
            return fail(0, format!("outcome {:?} inconsistent with scores", self.outcome));
        }
        Ok(())
    }

    /// Sums of the recorded per-round payoffs, accumulated in round order.
    pub fn round_payoff_sums(&self) -> (f64, f64) {
        self.rounds.iter().fold((0.0, 0.0), |(a, b), r| (a + r.payoffs[0], b + r.payoffs[1]))
    }
}

fn validate_round(kind: GameKind, r: &RoundRecord) -> Result<(), String> {
    for seat in 0..2 {
        let action = &r.actions[seat];
        if matches!(action, Action::Forfeit) {
            if r.forfeit != Some(Seat::from_index(seat)) {
                return Err("forfeit action without forfeit marker".into());
            }
            continue;
        }
        match (kind, action, &r.private[seat]) {
            (GameKind::StrategicClaim, Action::Claim { claim, threshold }, PrivateState::Value { value }) => {
                if !(1..=sc::MAX_VALUE).contains(value) {
                    return Err(format!("seat {seat}: value {value} outside 1..=6"));
                }
                if claim < value {
                    return Err(format!("seat {seat}: claim {claim} below value {value}"));
                }
                if *claim > sc::MAX_VALUE {
                    return Err(format!("seat {seat}: claim {claim} above 6"));
                }
                if !(1..=sc::NEVER_CHALLENGE).contains(threshold) {
                    return Err(format!("seat {seat}: threshold {threshold} outside 1..=7"));
                }
            }
            (GameKind::RepeatedPD, Action::Move { .. }, _) => {}
            (GameKind::SayTheSameThing, Action::Word { word }, _) => {
                if stst::Vocabulary::standard().index_of(word).is_none() {
                    return Err(format!("seat {seat}: word `{word}` outside vocabulary"));
                }
            }
            (GameKind::TextDixit, Action::Story { clue, predicted_confidence }, _) => {
                if !(dixit::MIN_CLUE..=dixit::MAX_CLUE).contains(&clue.len()) {
                    return Err(format!("seat {seat}: clue of {} tokens", clue.len()));
                }
                if !(0.0..=100.0).contains(predicted_confidence) {
                    return Err(format!("seat {seat}: predicted confidence out of range"));
                }
            }
            (GameKind::TextDixit, Action::Guess { guess, confidence }, _) => {
                if !(1..=dixit::SCENES_PER_ROUND as u8).contains(guess) {
                    return Err(format!("seat {seat}: guess {guess} outside 1..=6"));
                }
                if !(0.0..=100.0).contains(confidence) {
                    return Err(format!("seat {seat}: confidence out of range"));
                }
            }
            (GameKind::Auction, Action::Bid { bid }, PrivateState::AuctionValue { value }) => {
                if !(0.0..=*value).contains(bid) {
                    return Err(format!("seat {seat}: bid {bid} outside [0, {value}]"));
                }
            }
            (k, a, p) => return Err(format!("seat {seat}: {a:?} / {p:?} not valid for {k:?}")),
        }
    }
    Ok(())
}
