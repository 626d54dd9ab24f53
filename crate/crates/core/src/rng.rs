//! Deterministic randomness.
//!
//! Every generator is a ChaCha8 stream keyed by a 64-bit seed. ChaCha output
//! is specified bit-for-bit, so a seed reproduces the same draws on every
//! platform. Per-game seeds are derived from the master seed with a SplitMix64
//! mixing chain over the game coordinates, so any single game can be re-run in
//! isolation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{AgentId, GameKind};

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed.
pub fn combine(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &p| mix64(acc ^ mix64(p)))
}

/// FNV-1a over the bytes of a string; stable across platforms and releases.
pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Per-game seed: `hash(master_seed, game_kind, condition_index, pairing, replication)`.
pub fn derive_seed(
    master_seed: u64,
    kind: GameKind,
    condition_index: usize,
    agent_a: &AgentId,
    agent_b: &AgentId,
    replication: usize,
) -> u64 {
    combine(&[
        master_seed,
        kind.seed_tag(),
        condition_index as u64,
        hash_str(agent_a.as_str()),
        hash_str(agent_b.as_str()),
        replication as u64,
    ])
}

/// Seeded generator owned by a single game or analysis stage.
#[derive(Clone, Debug)]
pub struct GameRng {
    inner: ChaCha8Rng,
}

impl GameRng {
    pub fn new(seed: u64) -> Self {
        GameRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent child stream, e.g. one per bootstrap replicate.
    pub fn substream(seed: u64, index: u64) -> Self {
        GameRng::new(combine(&[seed, index]))
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform integer on the inclusive range `[lo, hi]`.
    pub fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.gen_range(lo..=hi)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.inner.gen_range(0..len)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Draws an index from a probability vector by inversion.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // Rounding left the tail short of 1; fall back to the last positive entry.
        probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    pub fn standard_normal(&mut self) -> f64 {
        // Box-Muller; one variate per call keeps the stream layout simple.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.inner);
    }

    pub fn next_seed(&mut self) -> u64 {
        self.inner.gen::<u64>()
    }
}
