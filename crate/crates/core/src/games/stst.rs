//! Say the Same Thing: vocabulary, semantic oracle and round payoffs.
//!
//! The vocabulary is a fixed list of words grouped into themes. Each word gets
//! a seeded embedding (theme centroid plus word-specific noise) and similarity
//! is the cosine mapped onto `[0, 1]`. The matrix is symmetric with an exact
//! unit diagonal, so `d = 1 - similarity` vanishes only for identical words.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::rng::{hash_str, GameRng};

pub const MAX_ROUNDS: u32 = 20;

const EMBED_DIM: usize = 16;
const VOCAB_SEED: u64 = 0x5354_5354_0000_0001;
const WORD_NOISE: f64 = 0.65;

const THEMES: &[&[&str]] = &[
    &["pet", "dog", "cat", "puppy", "kitten", "leash", "bark", "fur"],
    &["ocean", "wave", "beach", "sand", "shell", "tide", "salt", "surf"],
    &["bread", "butter", "toast", "jam", "flour", "oven", "bake", "crumb"],
    &["music", "song", "guitar", "drum", "melody", "piano", "rhythm", "choir"],
    &["winter", "snow", "ice", "cold", "frost", "sled", "scarf", "glacier"],
    &["city", "street", "traffic", "tower", "subway", "bridge", "taxi", "crowd"],
    &["forest", "tree", "leaf", "moss", "branch", "oak", "trail", "owl"],
    &["space", "star", "planet", "rocket", "moon", "orbit", "comet", "galaxy"],
];

/// Vocabulary together with its similarity matrix.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    embeddings: Vec<[f64; EMBED_DIM]>,
    sim: Vec<f64>,
}

fn random_unit(rng: &mut GameRng) -> [f64; EMBED_DIM] {
    let mut v = [0.0; EMBED_DIM];
    for x in v.iter_mut() {
        *x = rng.standard_normal();
    }
    normalize(&mut v);
    v
}

fn normalize(v: &mut [f64; EMBED_DIM]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn cosine_sim(a: &[f64; EMBED_DIM], b: &[f64; EMBED_DIM]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    ((1.0 + dot) / 2.0).clamp(0.0, 1.0)
}

impl Vocabulary {
    /// The built-in vocabulary used by every STST condition.
    pub fn standard() -> &'static Vocabulary {
        static VOCAB: OnceLock<Vocabulary> = OnceLock::new();
        VOCAB.get_or_init(Vocabulary::build)
    }

    fn build() -> Vocabulary {
        let mut rng = GameRng::new(VOCAB_SEED);
        let mut words = Vec::new();
        let mut embeddings = Vec::new();
        for theme in THEMES {
            let centroid = random_unit(&mut rng);
            for w in theme.iter() {
                let noise = random_unit(&mut rng);
                let mut e = [0.0; EMBED_DIM];
                for k in 0..EMBED_DIM {
                    e[k] = centroid[k] + WORD_NOISE * noise[k];
                }
                normalize(&mut e);
                words.push((*w).to_string());
                embeddings.push(e);
            }
        }
        let n = words.len();
        let mut sim = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let s = if i == j {
                    1.0
                } else {
                    cosine_sim(&embeddings[i], &embeddings[j]).min(1.0 - 1e-9)
                };
                sim[i * n + j] = s;
                sim[j * n + i] = s;
            }
        }
        Vocabulary {
            words,
            embeddings,
            sim,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    pub fn similarity(&self, i: usize, j: usize) -> f64 {
        self.sim[i * self.words.len() + j]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        1.0 - self.similarity(i, j)
    }

    /// Maps any emitted string onto a vocabulary index.
    ///
    /// Known words map to themselves (case-insensitively, after trimming).
    /// Unknown strings get an embedding seeded by their hash and map to the
    /// most similar word; ties go to the lowest index.
    pub fn resolve(&self, word: &str) -> usize {
        let w = word.trim().to_ascii_lowercase();
        if let Some(i) = self.index_of(&w) {
            return i;
        }
        let mut rng = GameRng::new(hash_str(&w));
        let e = random_unit(&mut rng);
        let mut best = 0;
        let mut best_sim = f64::NEG_INFINITY;
        for (i, emb) in self.embeddings.iter().enumerate() {
            let s = cosine_sim(&e, emb);
            if s > best_sim {
                best_sim = s;
                best = i;
            }
        }
        best
    }

    /// Focal salience of word `w` given the previous pair: `sim(w, p1) * sim(w, p2)`.
    pub fn focal_score(&self, w: usize, prev_a: usize, prev_b: usize) -> f64 {
        self.similarity(w, prev_a) * self.similarity(w, prev_b)
    }

    /// All distinct unordered pairs sorted by distance, split into `strata`
    /// equal-count bands from nearest to farthest.
    pub fn distance_strata(&self, strata: usize) -> Vec<Vec<(usize, usize)>> {
        let n = self.len();
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        pairs.sort_by(|a, b| {
            self.distance(a.0, a.1)
                .total_cmp(&self.distance(b.0, b.1))
                .then(a.cmp(b))
        });
        let per = pairs.len().div_ceil(strata);
        pairs.chunks(per).map(|c| c.to_vec()).collect()
    }
}

/// Payoff for converging at round `t`: `1 - t/20`, or 0 without convergence.
pub fn stst_payoff(converged_round: Option<u32>) -> Result<f64> {
    match converged_round {
        None => Ok(0.0),
        Some(t) if (1..=MAX_ROUNDS).contains(&t) => Ok(1.0 - f64::from(t) / f64::from(MAX_ROUNDS)),
        Some(t) => Err(Error::invalid(format!("STST round {t} outside 1..=20"))),
    }
}
