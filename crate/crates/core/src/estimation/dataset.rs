use serde::Serialize;

use crate::equilibrium::{
    receiver_utilities, sc_bluff_prob, sc_expected_utilities, ClaimProfile, BLUFF_CLAIM, EQUILIBRIUM_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::games::rpd::stage_utilities;
use crate::games::sc::{MAX_VALUE, NEVER_CHALLENGE};
use crate::record::{Action, GameRecord, Move, PrivateState};
use crate::types::{AgentId, GameKind, Seat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionKind {
    /// SC claim given the private value.
    Sender { value: u8 },
    /// SC challenge threshold.
    Receiver,
    /// RPD move.
    Move,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceObs {
    pub round: u32,
    pub decision: DecisionKind,
    /// Expected utility of each legal action.
    pub utilities: Vec<f64>,
    /// Alternatives as sets of action indices; singletons for plain choices.
    pub alternatives: Vec<Vec<usize>>,
    /// Index into `alternatives`.
    pub chosen: usize,
    /// Equilibrium probability of each alternative.
    pub nash: Vec<f64>,
}

impl ChoiceObs {
    pub fn plain(round: u32, decision: DecisionKind, utilities: Vec<f64>, chosen: usize, nash: Vec<f64>) -> Self {
        let alternatives = (0..utilities.len()).map(|i| vec![i]).collect();
        ChoiceObs {
            round,
            decision,
            utilities,
            alternatives,
            chosen,
            nash,
        }
    }

    /// True when every legal action has the same utility.
    pub fn is_flat(&self) -> bool {
        self.utilities.iter().all(|&u| u == self.utilities[0])
    }

    pub fn check(&self) -> Result<()> {
        if self.chosen >= self.alternatives.len() {
            return Err(Error::invalid(format!("round {}: chosen index out of range", self.round)));
        }
        if self.utilities.iter().any(|u| !u.is_finite()) {
            return Err(Error::invalid(format!("round {}: non-finite utility", self.round)));
        }
        if self.nash.len() != self.alternatives.len() {
            return Err(Error::invalid(format!("round {}: equilibrium prediction size", self.round)));
        }
        Ok(())
    }
}

/// Pooled opponent behaviour the utilities were computed against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpponentSummary {
    /// Frequency of each threshold `1..=7` (index `t - 1`).
    pub threshold_freq: [f64; 7],
    /// Opponent claim frequencies split by honesty; honest and bluff mass sum to 1.
    pub claim_honest: [f64; 7],
    pub claim_bluff: [f64; 7],
    pub cooperation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceDataset {
    pub agent: AgentId,
    pub kind: GameKind,
    pub obs: Vec<ChoiceObs>,
    pub opponent: Option<OpponentSummary>,
}

impl ChoiceDataset {
    pub fn new(agent: AgentId, kind: GameKind, obs: Vec<ChoiceObs>) -> Self {
        ChoiceDataset {
            agent,
            kind,
            obs,
            opponent: None,
        }
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    /// No observation carries utility differences, so `λ` is not identified.
    pub fn is_unidentified(&self) -> bool {
        self.obs.iter().all(ChoiceObs::is_flat)
    }

    pub fn sender_count(&self) -> usize {
        self.obs
            .iter()
            .filter(|o| matches!(o.decision, DecisionKind::Sender { .. }))
            .count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DatasetOptions {
    /// Drop SC receiver decisions.
    pub sender_only: bool,
    /// Score SC senders with `v <= 3` as bluff/honest and drop `v >= 4`.
    pub binarize: bool,
}

/// Equilibrium claim distribution for value `v` over claims `v..=6`.
pub(crate) fn nash_claims(v: u8) -> Vec<f64> {
    let n = (MAX_VALUE - v + 1) as usize;
    let beta = sc_bluff_prob(v).expect("legal value");
    let mut p = vec![0.0; n];
    p[0] += 1.0 - beta;
    p[(BLUFF_CLAIM - v) as usize] += beta;
    p
}

pub(crate) fn nash_thresholds() -> Vec<f64> {
    let mut p = vec![0.0; NEVER_CHALLENGE as usize];
    p[(EQUILIBRIUM_THRESHOLD - 1) as usize] = 1.0;
    p
}

/// Sender observation; `claim_index` is `claim - v`.
pub(crate) fn sender_obs(round: u32, v: u8, q: &[f64; 7], claim_index: usize, binarize: bool) -> ChoiceObs {
    let utilities = sc_expected_utilities(v, q).expect("legal value");
    let nash = nash_claims(v);
    if binarize {
        let bluff_mass: f64 = nash[1..].iter().sum();
        ChoiceObs {
            round,
            decision: DecisionKind::Sender { value: v },
            alternatives: vec![vec![0], (1..utilities.len()).collect()],
            utilities,
            chosen: usize::from(claim_index > 0),
            nash: vec![nash[0], bluff_mass],
        }
    } else {
        ChoiceObs::plain(round, DecisionKind::Sender { value: v }, utilities, claim_index, nash)
    }
}

pub(crate) fn receiver_obs(round: u32, profile: &ClaimProfile, threshold: u8) -> ChoiceObs {
    ChoiceObs::plain(
        round,
        DecisionKind::Receiver,
        receiver_utilities(profile).to_vec(),
        (threshold - 1) as usize,
        nash_thresholds(),
    )
}

pub(crate) fn move_obs(round: u32, coop: f64, mv: Move) -> ChoiceObs {
    let (uc, ud) = stage_utilities(coop);
    ChoiceObs::plain(
        round,
        DecisionKind::Move,
        vec![uc, ud],
        usize::from(mv == Move::D),
        vec![0.0, 1.0],
    )
}

/// `(record, agent seat)` for every seat the agent occupies in a record of `kind`.
fn seats<'r>(records: &'r [GameRecord], agent: &AgentId, kind: GameKind) -> Vec<(&'r GameRecord, Seat)> {
    records
        .iter()
        .filter(|r| r.game_kind == kind)
        .flat_map(|r| r.seats_of(agent).into_iter().map(move |s| (r, s)))
        .collect()
}

pub fn build_choice_dataset(records: &[GameRecord], agent: &AgentId, kind: GameKind) -> Result<ChoiceDataset> {
    build_choice_dataset_with(records, agent, kind, DatasetOptions::default())
}

/// One observation per (round, decision) of `agent`, with utilities computed
/// against the opponents' pooled action frequencies over all of `records`.
pub fn build_choice_dataset_with(
    records: &[GameRecord],
    agent: &AgentId,
    kind: GameKind,
    opts: DatasetOptions,
) -> Result<ChoiceDataset> {
    let seats = seats(records, agent, kind);
    let mut obs = Vec::new();
    let summary = match kind {
        GameKind::StrategicClaim => {
            let mut thresholds = [0.0f64; 7];
            let mut claims = ClaimProfile::zero();
            for (r, s) in &seats {
                let o = s.other().index();
                for round in r.rounds.iter().filter(|x| x.forfeit.is_none()) {
                    if let (Action::Claim { claim, threshold }, PrivateState::Value { value }) =
                        (&round.actions[o], &round.private[o])
                    {
                        thresholds[(*threshold - 1) as usize] += 1.0;
                        if claim > value {
                            claims.bluff[*claim as usize] += 1.0;
                        } else {
                            claims.honest[*claim as usize] += 1.0;
                        }
                    }
                }
            }
            let total: f64 = thresholds.iter().sum();
            if total == 0.0 {
                return Err(Error::EmptyDataset(format!("no {kind:?} decisions by `{agent}`")));
            }
            thresholds.iter_mut().for_each(|x| *x /= total);
            let mut q = [0.0; 7];
            for c in 1..=MAX_VALUE as usize {
                q[c] = thresholds[..c].iter().sum::<f64>().min(1.0);
            }
            let profile = claims.normalized();
            for (r, s) in &seats {
                let i = s.index();
                for round in r.rounds.iter().filter(|x| x.forfeit.is_none()) {
                    if let (Action::Claim { claim, threshold }, PrivateState::Value { value }) =
                        (&round.actions[i], &round.private[i])
                    {
                        if !(opts.binarize && *value > 3) {
                            obs.push(sender_obs(round.round, *value, &q, (claim - value) as usize, opts.binarize));
                        }
                        if !opts.sender_only {
                            obs.push(receiver_obs(round.round, &profile, *threshold));
                        }
                    }
                }
            }
            OpponentSummary {
                threshold_freq: thresholds,
                claim_honest: profile.honest,
                claim_bluff: profile.bluff,
                cooperation: 0.0,
            }
        }
        GameKind::RepeatedPD => {
            let mut moves = 0.0;
            let mut coops = 0.0;
            for (r, s) in &seats {
                let o = s.other().index();
                for round in r.rounds.iter().filter(|x| x.forfeit.is_none()) {
                    if let Action::Move { mv, .. } = &round.actions[o] {
                        moves += 1.0;
                        if *mv == Move::C {
                            coops += 1.0;
                        }
                    }
                }
            }
            if moves == 0.0 {
                return Err(Error::EmptyDataset(format!("no {kind:?} decisions by `{agent}`")));
            }
            let coop = coops / moves;
            for (r, s) in &seats {
                for round in r.rounds.iter().filter(|x| x.forfeit.is_none()) {
                    if let Action::Move { mv, .. } = &round.actions[s.index()] {
                        obs.push(move_obs(round.round, coop, *mv));
                    }
                }
            }
            OpponentSummary {
                threshold_freq: [0.0; 7],
                claim_honest: [0.0; 7],
                claim_bluff: [0.0; 7],
                cooperation: coop,
            }
        }
        _ => {
            return Err(Error::invalid(format!(
                "QRE estimation is defined for Strategic Claim and Repeated PD, not {kind:?}"
            )))
        }
    };
    if obs.is_empty() {
        return Err(Error::EmptyDataset(format!("no {kind:?} decisions by `{agent}`")));
    }
    Ok(ChoiceDataset {
        agent: agent.clone(),
        kind,
        obs,
        opponent: Some(summary),
    })
}
