//! Synthetic policies with known rationality.

use crate::agents::beliefs::{smoothed_bluff_belief, BeliefState};
use crate::agents::{Context, Observation, Role};
use crate::equilibrium::{
    logit, receiver_utilities, sc_bluff_prob, sc_conditional_bluff_rate, sc_expected_utilities, BLUFF_CLAIM,
    EQUILIBRIUM_THRESHOLD,
};
use crate::games::auction::{equilibrium_bid, win_prob_vs_equilibrium};
use crate::games::dixit::{self, calibrated_confidence, dixit_score, scene_posterior, DixitRound};
use crate::games::rpd::stage_utilities;
use crate::games::sc::{MAX_VALUE, NEVER_CHALLENGE};
use crate::games::stst::Vocabulary;
use crate::record::{Action, Move, PrivateState};
use crate::rng::GameRng;
use crate::types::GameKind;

/// Utility units per unit of focal salience in STST.
pub const STST_SALIENCE_SCALE: f64 = 10.0;
/// Utility units per unit of clue-token relevance in Text-Dixit.
pub const DIXIT_CLUE_SCALE: f64 = 10.0;
/// Confidence predictions are chosen on a 5-point grid.
pub const CONFIDENCE_STEP: f64 = 5.0;
/// Bids are chosen among `k/10` of the private value.
pub const BID_FRACTIONS: usize = 11;

/// `(1 - η) β̂ + η 1[bluffed]`.
pub fn smoothing_update(belief: f64, observed_bluff: bool, eta: f64) -> f64 {
    (1.0 - eta) * belief + eta * if observed_bluff { 1.0 } else { 0.0 }
}

/// Bluff probability `β* + κ (β̂ - β*)` inside the band, `β*` outside.
pub fn smoothing_bluff_prob(belief: f64, kappa: f64, band: f64) -> f64 {
    let target = sc_conditional_bluff_rate();
    if (belief - target).abs() < band {
        (target + kappa * (belief - target)).clamp(0.0, 1.0)
    } else {
        target
    }
}

pub fn smoothing_decide(belief: f64, kappa: f64, band: f64, rng: &mut GameRng) -> bool {
    rng.bernoulli(smoothing_bluff_prob(belief, kappa, band))
}

fn sc_value(obs: &Observation<'_>) -> u8 {
    match obs.private {
        PrivateState::Value { value } => value,
        _ => panic!("Strategic Claim observation without a private value"),
    }
}

fn auction_value(obs: &Observation<'_>) -> f64 {
    match obs.private {
        PrivateState::AuctionValue { value } => value,
        _ => panic!("auction observation without a private value"),
    }
}

fn stst_previous(obs: &Observation<'_>) -> [usize; 2] {
    match obs.context {
        Context::Stst { previous } => previous,
        _ => panic!("STST observation without previous words"),
    }
}

fn argmax(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
        .0
}

fn sample_logit(utilities: &[f64], lambda: f64, rng: &mut GameRng) -> usize {
    rng.categorical(&logit(utilities, lambda))
}

fn confidence_grid() -> Vec<f64> {
    (0..=(100.0 / CONFIDENCE_STEP) as usize).map(|k| k as f64 * CONFIDENCE_STEP).collect()
}

/// Clue relevance: membership in the target minus the share of decoys
/// containing the token.
fn token_relevance(round: &DixitRound, token: &str) -> f64 {
    let target = round.target as usize - 1;
    let mut rel = 0.0;
    for (i, s) in round.scenes.iter().enumerate() {
        if s.tokens.iter().any(|t| t == token) {
            if i == target {
                rel += 1.0;
            } else {
                rel -= 1.0 / (dixit::SCENES_PER_ROUND - 1) as f64;
            }
        }
    }
    rel
}

fn story_round<'a>(obs: &Observation<'a>) -> &'a DixitRound {
    match obs.context {
        Context::DixitStory { round } => round,
        _ => panic!("storyteller observation without a scene set"),
    }
}

fn guess_context<'a>(obs: &Observation<'a>) -> (&'a [dixit::Scene], &'a [String]) {
    match obs.context {
        Context::DixitGuess { scenes, clue } => (scenes, clue),
        _ => panic!("guesser observation without clue"),
    }
}

/// Logit response with rationality `lambda`.
pub fn qre_decide(lambda: f64, obs: &Observation<'_>, rng: &mut GameRng) -> Action {
    match obs.kind {
        GameKind::StrategicClaim => {
            let v = sc_value(obs);
            let beliefs = BeliefState::from_history(obs.seat, obs.history);
            let u = sc_expected_utilities(v, &beliefs.challenge_freq).expect("legal value");
            let claim = v + sample_logit(&u, lambda, rng) as u8;
            let ru = receiver_utilities(&beliefs.opponent_claims);
            let threshold = 1 + sample_logit(&ru, lambda, rng) as u8;
            Action::Claim { claim, threshold }
        }
        GameKind::RepeatedPD => {
            let beliefs = BeliefState::from_history(obs.seat, obs.history);
            let (uc, ud) = stage_utilities(beliefs.cooperation);
            let mv = if sample_logit(&[uc, ud], lambda, rng) == 0 { Move::C } else { Move::D };
            Action::Move { mv, message: String::new() }
        }
        GameKind::SayTheSameThing => {
            let vocab = Vocabulary::standard();
            let [pa, pb] = stst_previous(obs);
            let u: Vec<f64> = (0..vocab.len())
                .map(|w| STST_SALIENCE_SCALE * vocab.focal_score(w, pa, pb))
                .collect();
            let w = sample_logit(&u, lambda, rng);
            Action::Word { word: vocab.word(w).to_string() }
        }
        GameKind::TextDixit => match obs.role {
            Role::Storyteller => {
                let round = story_round(obs);
                let mut pool = round.word_bank.clone();
                let mut clue = Vec::with_capacity(dixit::MIN_CLUE);
                for _ in 0..dixit::MIN_CLUE {
                    let u: Vec<f64> = pool.iter().map(|t| DIXIT_CLUE_SCALE * token_relevance(round, t)).collect();
                    clue.push(pool.remove(sample_logit(&u, lambda, rng)));
                }
                let (_, expected) = calibrated_confidence(&clue, &round.scenes);
                let grid = confidence_grid();
                let u: Vec<f64> = grid
                    .iter()
                    .map(|&g| dixit_score(g, expected).expect("grid in range"))
                    .collect();
                let predicted_confidence = grid[sample_logit(&u, lambda, rng)];
                Action::Story { clue, predicted_confidence }
            }
            _ => {
                let (scenes, clue) = guess_context(obs);
                let post = scene_posterior(clue, scenes);
                let u: Vec<f64> = post.iter().map(|p| 100.0 * p).collect();
                let s = sample_logit(&u, lambda, rng);
                Action::Guess { guess: s as u8 + 1, confidence: 100.0 * post[s] }
            }
        },
        GameKind::Auction => {
            let v = auction_value(obs);
            let bids: Vec<f64> = (0..BID_FRACTIONS)
                .map(|k| v * k as f64 / (BID_FRACTIONS - 1) as f64)
                .collect();
            let u: Vec<f64> = bids.iter().map(|&b| (v - b) * win_prob_vs_equilibrium(b)).collect();
            Action::Bid { bid: bids[sample_logit(&u, lambda, rng)] }
        }
    }
}

/// Equilibrium play.
pub fn nash_decide(obs: &Observation<'_>, rng: &mut GameRng) -> Action {
    match obs.kind {
        GameKind::StrategicClaim => {
            let v = sc_value(obs);
            let bluff = rng.bernoulli(sc_bluff_prob(v).expect("legal value"));
            let claim = if bluff { BLUFF_CLAIM } else { v };
            Action::Claim { claim, threshold: EQUILIBRIUM_THRESHOLD }
        }
        GameKind::RepeatedPD => Action::Move { mv: Move::D, message: String::new() },
        GameKind::SayTheSameThing => {
            let vocab = Vocabulary::standard();
            let [pa, pb] = stst_previous(obs);
            let scores: Vec<f64> = (0..vocab.len()).map(|w| vocab.focal_score(w, pa, pb)).collect();
            Action::Word { word: vocab.word(argmax(&scores)).to_string() }
        }
        GameKind::TextDixit => match obs.role {
            Role::Storyteller => {
                let round = story_round(obs);
                let mut ranked: Vec<(usize, f64)> = round
                    .word_bank
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (i, token_relevance(round, t)))
                    .collect();
                ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                let clue: Vec<String> = ranked[..dixit::MIN_CLUE]
                    .iter()
                    .map(|&(i, _)| round.word_bank[i].clone())
                    .collect();
                let (_, predicted_confidence) = calibrated_confidence(&clue, &round.scenes);
                Action::Story { clue, predicted_confidence }
            }
            _ => {
                let (scenes, clue) = guess_context(obs);
                let (s, confidence) = calibrated_confidence(clue, scenes);
                Action::Guess { guess: s as u8 + 1, confidence }
            }
        },
        GameKind::Auction => Action::Bid { bid: equilibrium_bid(auction_value(obs)) },
    }
}

/// Uniform play. In SC the bluff/honest choice is a fair coin (bluffs pick a
/// claim uniformly above the value) and thresholds are uniform on `1..=7`.
pub fn random_decide(obs: &Observation<'_>, rng: &mut GameRng) -> Action {
    match obs.kind {
        GameKind::StrategicClaim => {
            let v = sc_value(obs);
            let claim = if v < MAX_VALUE && rng.bernoulli(0.5) {
                rng.int_inclusive(i64::from(v) + 1, i64::from(MAX_VALUE)) as u8
            } else {
                v
            };
            let threshold = rng.int_inclusive(1, i64::from(NEVER_CHALLENGE)) as u8;
            Action::Claim { claim, threshold }
        }
        GameKind::RepeatedPD => {
            let mv = if rng.bernoulli(0.5) { Move::C } else { Move::D };
            Action::Move { mv, message: String::new() }
        }
        GameKind::SayTheSameThing => {
            let vocab = Vocabulary::standard();
            Action::Word { word: vocab.word(rng.index(vocab.len())).to_string() }
        }
        GameKind::TextDixit => match obs.role {
            Role::Storyteller => {
                let round = story_round(obs);
                let len = rng.int_inclusive(dixit::MIN_CLUE as i64, dixit::MAX_CLUE as i64) as usize;
                let mut bank = round.word_bank.clone();
                rng.shuffle(&mut bank);
                bank.truncate(len);
                Action::Story { clue: bank, predicted_confidence: 100.0 * rng.uniform() }
            }
            _ => Action::Guess {
                guess: 1 + rng.index(dixit::SCENES_PER_ROUND) as u8,
                confidence: 100.0 * rng.uniform(),
            },
        },
        GameKind::Auction => Action::Bid { bid: auction_value(obs) * rng.uniform() },
    }
}

/// Smoothing learner: in SC, low values bluff to 6 with the smoothed
/// best-response probability and the receiver keeps the equilibrium
/// threshold. Other games fall back to equilibrium play.
pub fn smoothing_agent_decide(
    eta: f64,
    kappa: f64,
    initial: f64,
    band: f64,
    obs: &Observation<'_>,
    rng: &mut GameRng,
) -> Action {
    if obs.kind != GameKind::StrategicClaim {
        return nash_decide(obs, rng);
    }
    let v = sc_value(obs);
    let belief = smoothed_bluff_belief(obs.seat, obs.history, eta, initial);
    let bluff = v <= 3 && smoothing_decide(belief, kappa, band, rng);
    Action::Claim {
        claim: if bluff { BLUFF_CLAIM } else { v },
        threshold: EQUILIBRIUM_THRESHOLD,
    }
}
