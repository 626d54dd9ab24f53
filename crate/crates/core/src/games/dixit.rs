//! Text-Dixit: procedural scenes, the calibration score and the clue oracle.
//!
//! A scene fills three template slots (object, surreal transformation,
//! setting). Each slot carries keyword tokens, and a scene's token set is the
//! union of its slots' keywords. The word bank for a round holds every token
//! of the target plus distractor tokens taken from the decoys.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::GameRng;

pub const ROUNDS: u32 = 4;
pub const SCENES_PER_ROUND: usize = 6;
pub const MIN_BANK: usize = 10;
pub const MAX_BANK: usize = 15;
pub const MIN_CLUE: usize = 2;
pub const MAX_CLUE: usize = 4;

/// Sharpness of the shared clue-to-scene inference model.
pub const CLUE_SHARPNESS: f64 = 2.0;

struct Slot {
    phrase: &'static str,
    tokens: &'static [&'static str],
}

const OBJECTS: &[Slot] = &[
    Slot { phrase: "grandfather clock", tokens: &["clock", "time", "old"] },
    Slot { phrase: "violin", tokens: &["violin", "music", "strings"] },
    Slot { phrase: "library of books", tokens: &["books", "library", "pages"] },
    Slot { phrase: "teacup", tokens: &["teacup", "porcelain", "tea"] },
    Slot { phrase: "staircase", tokens: &["staircase", "steps", "climb"] },
    Slot { phrase: "chess set", tokens: &["chess", "game", "king"] },
    Slot { phrase: "lighthouse", tokens: &["lighthouse", "beacon", "coast"] },
    Slot { phrase: "bicycle", tokens: &["bicycle", "wheels", "ride"] },
    Slot { phrase: "umbrella", tokens: &["umbrella", "rain", "shelter"] },
    Slot { phrase: "whale", tokens: &["whale", "giant", "deep"] },
    Slot { phrase: "typewriter", tokens: &["typewriter", "letters", "keys"] },
    Slot { phrase: "hot-air balloon", tokens: &["balloon", "float", "basket"] },
    Slot { phrase: "cat in a monocle", tokens: &["cat", "monocle", "curious"] },
    Slot { phrase: "train", tokens: &["train", "journey", "rails"] },
];

const TRANSFORMS: &[Slot] = &[
    Slot { phrase: "melting slowly", tokens: &["melting", "liquid"] },
    Slot { phrase: "playing itself", tokens: &["playing", "alone"] },
    Slot { phrase: "flying between shelves", tokens: &["flying", "wings"] },
    Slot { phrase: "turned upside-down", tokens: &["upside", "inverted"] },
    Slot { phrase: "spiraling into clouds", tokens: &["spiral", "clouds"] },
    Slot { phrase: "marching in formation", tokens: &["march", "formation"] },
    Slot { phrase: "made of glass", tokens: &["glass", "fragile"] },
    Slot { phrase: "casting a shadow that walks away", tokens: &["shadow", "escape"] },
    Slot { phrase: "growing roots", tokens: &["roots", "growing"] },
    Slot { phrase: "whispering secrets", tokens: &["whisper", "secret"] },
    Slot { phrase: "folding like paper", tokens: &["folding", "paper"] },
    Slot { phrase: "glowing from within", tokens: &["glowing", "light"] },
];

const SETTINGS: &[Slot] = &[
    Slot { phrase: "over a park bench", tokens: &["park", "bench"] },
    Slot { phrase: "under two moons", tokens: &["moons", "night"] },
    Slot { phrase: "in a garden of glass flowers", tokens: &["garden", "flowers"] },
    Slot { phrase: "inside a train station", tokens: &["station", "platform"] },
    Slot { phrase: "beneath the sea", tokens: &["sea", "underwater"] },
    Slot { phrase: "on a desert dune", tokens: &["desert", "dune"] },
    Slot { phrase: "at the edge of a cliff", tokens: &["cliff", "edge"] },
    Slot { phrase: "in an empty ballroom", tokens: &["ballroom", "dance"] },
    Slot { phrase: "on a frozen lake", tokens: &["frozen", "lake"] },
    Slot { phrase: "in a crowded market", tokens: &["market", "crowd"] },
];

/// One procedurally generated scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub text: String,
    pub tokens: Vec<String>,
}

/// Preconditions for one Text-Dixit round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DixitRound {
    pub scenes: Vec<Scene>,
    /// 1-based index of the target scene.
    pub target: u8,
    pub word_bank: Vec<String>,
}

fn pick_distinct(rng: &mut GameRng, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut idx);
    idx.truncate(k);
    idx
}

fn make_scene(object: &Slot, transform: &Slot, setting: &Slot) -> Scene {
    let text = format!("A {} {} {}.", object.phrase, transform.phrase, setting.phrase);
    let mut tokens: Vec<String> = Vec::new();
    for t in object.tokens.iter().chain(transform.tokens).chain(setting.tokens) {
        if !tokens.iter().any(|x| x == t) {
            tokens.push((*t).to_string());
        }
    }
    Scene { text, tokens }
}

/// Generates the scenes, target and word bank for one round.
pub fn generate_round(rng: &mut GameRng) -> DixitRound {
    let objects = pick_distinct(rng, OBJECTS.len(), SCENES_PER_ROUND);
    let transforms = pick_distinct(rng, TRANSFORMS.len(), SCENES_PER_ROUND);
    let scenes: Vec<Scene> = (0..SCENES_PER_ROUND)
        .map(|i| {
            let setting = &SETTINGS[rng.index(SETTINGS.len())];
            make_scene(&OBJECTS[objects[i]], &TRANSFORMS[transforms[i]], setting)
        })
        .collect();
    let target = rng.index(SCENES_PER_ROUND);

    let bank_size = rng.int_inclusive(MIN_BANK as i64, MAX_BANK as i64) as usize;
    let mut bank: Vec<String> = scenes[target].tokens.clone();
    let mut distractors: Vec<String> = scenes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target)
        .flat_map(|(_, s)| s.tokens.iter().cloned())
        .filter(|t| !bank.contains(t))
        .collect();
    distractors.dedup();
    rng.shuffle(&mut distractors);
    for d in distractors {
        if bank.len() >= bank_size {
            break;
        }
        if !bank.contains(&d) {
            bank.push(d);
        }
    }
    rng.shuffle(&mut bank);

    DixitRound {
        scenes,
        target: (target + 1) as u8,
        word_bank: bank,
    }
}

/// Calibration score `100 * (1 - (p_hat/100 - p/100)^2)`.
pub fn dixit_score(predicted: f64, reported: f64) -> Result<f64> {
    for (name, x) in [("predicted", predicted), ("reported", reported)] {
        if !(0.0..=100.0).contains(&x) {
            return Err(Error::invalid(format!("{name} confidence {x} outside [0, 100]")));
        }
    }
    let diff = predicted / 100.0 - reported / 100.0;
    Ok(100.0 * (1.0 - diff * diff))
}

/// Number of clue tokens appearing in each scene.
pub fn clue_overlap(clue: &[String], scenes: &[Scene]) -> Vec<usize> {
    scenes
        .iter()
        .map(|s| clue.iter().filter(|c| s.tokens.contains(c)).count())
        .collect()
}

/// Posterior over scenes under the shared inference model,
/// `P(s | clue) ∝ exp(CLUE_SHARPNESS * overlap(clue, s))`.
pub fn scene_posterior(clue: &[String], scenes: &[Scene]) -> Vec<f64> {
    let overlap = clue_overlap(clue, scenes);
    let max = overlap.iter().copied().max().unwrap_or(0) as f64;
    let w: Vec<f64> = overlap
        .iter()
        .map(|&o| (CLUE_SHARPNESS * (o as f64 - max)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Confidence (percent) a calibrated guesser reports for its modal guess.
pub fn calibrated_confidence(clue: &[String], scenes: &[Scene]) -> (usize, f64) {
    let post = scene_posterior(clue, scenes);
    let (best, p) = post
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
    (best, 100.0 * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_examples() {
        assert_eq!(dixit_score(70.0, 70.0).unwrap(), 100.0);
        assert_eq!(dixit_score(100.0, 0.0).unwrap(), 0.0);
        // 100 * (1 - 0.2^2) = 96
        assert!((dixit_score(70.0, 50.0).unwrap() - 96.0).abs() < 1e-12);
        assert!(dixit_score(101.0, 50.0).is_err());
        assert!(dixit_score(50.0, -1.0).is_err());
    }

    #[test]
    fn generated_rounds_respect_limits() {
        let mut rng = GameRng::new(11);
        for _ in 0..200 {
            let r = generate_round(&mut rng);
            assert_eq!(r.scenes.len(), SCENES_PER_ROUND);
            assert!((1..=6).contains(&r.target));
            assert!((MIN_BANK..=MAX_BANK).contains(&r.word_bank.len()), "{}", r.word_bank.len());
            let target = &r.scenes[r.target as usize - 1];
            for t in &target.tokens {
                assert!(r.word_bank.contains(t));
            }
            let mut sorted = r.word_bank.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), r.word_bank.len());
        }
    }

    #[test]
    fn posterior_prefers_overlapping_scene() {
        let mut rng = GameRng::new(5);
        let r = generate_round(&mut rng);
        let target = &r.scenes[r.target as usize - 1];
        let clue = vec![target.tokens[0].clone(), target.tokens[1].clone()];
        let post = scene_posterior(&clue, &r.scenes);
        assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let (best, conf) = calibrated_confidence(&clue, &r.scenes);
        assert!(post[r.target as usize - 1] >= post[best] - 1e-15);
        assert!(conf > 100.0 / 6.0);
    }
}
