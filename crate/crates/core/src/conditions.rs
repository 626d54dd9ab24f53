//! Pre-sampled game conditions.
//!
//! A `(game_kind, master_seed, index)` triple fully determines a condition
//! set, so every pairing can replay identical setups.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::dixit::{self, DixitRound};
use crate::games::sc;
use crate::games::stst::Vocabulary;
use crate::rng::{combine, GameRng};
use crate::types::GameKind;

pub const DEFAULT_CONDITION_COUNT: usize = 150;
pub const RPD_MIN_HORIZON: u32 = 7;
pub const RPD_MAX_HORIZON: u32 = 15;
pub const STST_STRATA: usize = 3;

/// Per-game preconditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConditionPayload {
    /// Private values `[a, b]` per round.
    StrategicClaim { values: Vec<[u8; 2]> },
    RepeatedPd { horizon: u32 },
    SayTheSameThing {
        start: [String; 2],
        distance: f64,
        stratum: usize,
    },
    TextDixit { rounds: Vec<DixitRound> },
    Auction { values: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSet {
    pub game_kind: GameKind,
    pub index: usize,
    pub payload: ConditionPayload,
}

impl ConditionSet {
    /// Builds the condition with the given index.
    pub fn generate(kind: GameKind, master_seed: u64, index: usize) -> ConditionSet {
        let mut rng = GameRng::new(combine(&[master_seed, 0xC0DE, kind as u64, index as u64]));
        let payload = match kind {
            GameKind::StrategicClaim => ConditionPayload::StrategicClaim {
                values: (0..sc::ROUNDS)
                    .map(|_| {
                        [
                            rng.int_inclusive(1, i64::from(sc::MAX_VALUE)) as u8,
                            rng.int_inclusive(1, i64::from(sc::MAX_VALUE)) as u8,
                        ]
                    })
                    .collect(),
            },
            GameKind::RepeatedPD => ConditionPayload::RepeatedPd {
                horizon: rng.int_inclusive(i64::from(RPD_MIN_HORIZON), i64::from(RPD_MAX_HORIZON))
                    as u32,
            },
            GameKind::SayTheSameThing => {
                let vocab = Vocabulary::standard();
                let strata = vocab.distance_strata(STST_STRATA);
                let stratum = index % STST_STRATA;
                let (i, j) = strata[stratum][rng.index(strata[stratum].len())];
                let (i, j) = if rng.bernoulli(0.5) { (i, j) } else { (j, i) };
                ConditionPayload::SayTheSameThing {
                    start: [vocab.word(i).to_string(), vocab.word(j).to_string()],
                    distance: vocab.distance(i, j),
                    stratum,
                }
            }
            GameKind::TextDixit => ConditionPayload::TextDixit {
                rounds: (0..dixit::ROUNDS).map(|_| dixit::generate_round(&mut rng)).collect(),
            },
            GameKind::Auction => ConditionPayload::Auction {
                values: [100.0 * rng.uniform(), 100.0 * rng.uniform()],
            },
        };
        ConditionSet {
            game_kind: kind,
            index,
            payload,
        }
    }

    /// Checks that payload fields lie in the owning game's legal ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(format!("condition {}: {m}", self.index)));
        match (&self.payload, self.game_kind) {
            (ConditionPayload::StrategicClaim { values }, GameKind::StrategicClaim) => {
                if values.len() != sc::ROUNDS as usize {
                    return bad(format!("{} value rounds", values.len()));
                }
                if values.iter().flatten().any(|v| !(1..=sc::MAX_VALUE).contains(v)) {
                    return bad("value outside 1..=6".into());
                }
            }
            (ConditionPayload::RepeatedPd { horizon }, GameKind::RepeatedPD) => {
                if !(RPD_MIN_HORIZON..=RPD_MAX_HORIZON).contains(horizon) {
                    return bad(format!("horizon {horizon} outside 7..=15"));
                }
            }
            (ConditionPayload::SayTheSameThing { start, .. }, GameKind::SayTheSameThing) => {
                let v = Vocabulary::standard();
                if start[0] == start[1] {
                    return bad("starting words must differ".into());
                }
                if start.iter().any(|w| v.index_of(w).is_none()) {
                    return bad("starting word outside vocabulary".into());
                }
            }
            (ConditionPayload::TextDixit { rounds }, GameKind::TextDixit) => {
                if rounds.len() != dixit::ROUNDS as usize {
                    return bad(format!("{} dixit rounds", rounds.len()));
                }
                for r in rounds {
                    if r.scenes.len() != dixit::SCENES_PER_ROUND || !(1..=6).contains(&r.target) {
                        return bad("malformed scene set".into());
                    }
                }
            }
            (ConditionPayload::Auction { values }, GameKind::Auction) => {
                if values.iter().any(|v| !(0.0..=100.0).contains(v)) {
                    return bad("auction value outside [0, 100]".into());
                }
            }
            _ => return bad(format!("payload does not match {:?}", self.game_kind)),
        }
        Ok(())
    }
}

/// Pre-samples `count` condition sets for one game kind.
pub fn sample_conditions(kind: GameKind, master_seed: u64, count: usize) -> Result<Vec<ConditionSet>> {
    if count == 0 {
        return Err(Error::invalid("condition count must be at least 1"));
    }
    Ok((0..count)
        .map(|i| ConditionSet::generate(kind, master_seed, i))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sc_values_in_range_and_deterministic() {
        let a = sample_conditions(GameKind::StrategicClaim, 42, 150).unwrap();
        let b = sample_conditions(GameKind::StrategicClaim, 42, 150).unwrap();
        assert_eq!(a.len(), 150);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for c in &a {
            c.validate().unwrap();
        }
    }

    #[test]
    fn sc_values_cover_the_support() {
        let a = sample_conditions(GameKind::StrategicClaim, 42, 150).unwrap();
        let mut counts = [0usize; 7];
        for c in &a {
            if let ConditionPayload::StrategicClaim { values } = &c.payload {
                for v in values.iter().flatten() {
                    counts[*v as usize] += 1;
                }
            }
        }
        assert_eq!(counts[0], 0);
        // 3000 draws; each face expects 500.
        for &n in &counts[1..] {
            assert!((400..600).contains(&n), "{counts:?}");
        }
    }

    #[test]
    fn rpd_horizon_mean_matches_uniform_7_15() {
        let conds = sample_conditions(GameKind::RepeatedPD, 7, 1000).unwrap();
        let hs: Vec<f64> = conds
            .iter()
            .map(|c| match c.payload {
                ConditionPayload::RepeatedPd { horizon } => f64::from(horizon),
                _ => unreachable!(),
            })
            .collect();
        // Monte Carlo oracle: mean of Uniform{7..15} is 11, sd sqrt(80/12).
        let oracle: f64 = (7..=15).map(f64::from).sum::<f64>() / 9.0;
        assert_eq!(oracle, 11.0);
        let mean = hs.iter().sum::<f64>() / hs.len() as f64;
        assert!((mean - oracle).abs() < 0.2, "mean {mean}");
        assert!(hs.iter().all(|h| (7.0..=15.0).contains(h)));
    }

    #[test]
    fn every_kind_validates() {
        for kind in GameKind::ALL {
            for c in sample_conditions(kind, 3, 20).unwrap() {
                c.validate().unwrap();
            }
        }
    }

    #[test]
    fn stst_strata_rotate_with_index() {
        let conds = sample_conditions(GameKind::SayTheSameThing, 9, 30).unwrap();
        let mut near = 0.0;
        let mut far = 0.0;
        for c in &conds {
            if let ConditionPayload::SayTheSameThing { distance, stratum, .. } = &c.payload {
                assert_eq!(*stratum, c.index % STST_STRATA);
                if *stratum == 0 {
                    near += distance;
                } else if *stratum == 2 {
                    far += distance;
                }
            }
        }
        assert!(near < far);
    }

    #[test]
    fn zero_count_rejected() {
        assert!(sample_conditions(GameKind::Auction, 1, 0).is_err());
    }
}
