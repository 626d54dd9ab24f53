//! Per-axis ELO under the Bradley-Terry model.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::record::GameRecord;
use crate::rng::GameRng;
use crate::stats::{normal_two_sided_p, percentile, sample_sd};
use crate::types::{AgentId, Axis};

pub const K_FACTOR: f64 = 32.0;
pub const INITIAL_RATING: f64 = 1500.0;
/// Rating transfers are rounded to multiples of this so that
/// `R_a + R_b` is conserved bit-for-bit.
const TRANSFER_QUANTUM: f64 = 1.0 / 4_294_967_296.0;

/// Win probability for a rating advantage of `delta` points.
pub fn bt_prob(delta: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-delta / 400.0))
}

/// Sequential update for one game; `score_a` is 1, 0.5 or 0.
pub fn elo_update(ra: f64, rb: f64, score_a: f64, k: f64) -> Result<(f64, f64)> {
    if ![0.0, 0.5, 1.0].contains(&score_a) {
        return Err(Error::invalid(format!("outcome score {score_a} not in {{0, 0.5, 1}}")));
    }
    if !(k > 0.0) {
        return Err(Error::invalid(format!("K = {k} must be > 0")));
    }
    let transfer = (k * (score_a - bt_prob(ra - rb)) / TRANSFER_QUANTUM).round() * TRANSFER_QUANTUM;
    Ok((ra + transfer, rb - transfer))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatingRow {
    pub agent: String,
    pub axis: Axis,
    pub rating: f64,
    pub n_games: usize,
    pub boot_sd: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatingTable {
    pub axis: Axis,
    pub rows: Vec<RatingRow>,
    /// Diagnostics: zero-variance axes, degenerate bootstrap pairs.
    pub notes: Vec<String>,
}

impl RatingTable {
    pub fn rating(&self, agent: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.agent == agent).map(|r| r.rating)
    }

    pub fn row(&self, agent: &str) -> Option<&RatingRow> {
        self.rows.iter().find(|r| r.agent == agent)
    }
}

fn axis_records(records: &[GameRecord], axis: Axis) -> Vec<&GameRecord> {
    records.iter().filter(|r| r.axis == axis).collect()
}

/// Final ratings after processing `records` in a seeded random order.
fn rate(records: &[&GameRecord], order_seed: u64) -> BTreeMap<AgentId, f64> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    GameRng::new(order_seed).shuffle(&mut order);
    let mut ratings: BTreeMap<AgentId, f64> = BTreeMap::new();
    for r in records {
        ratings.entry(r.agent_a.clone()).or_insert(INITIAL_RATING);
        ratings.entry(r.agent_b.clone()).or_insert(INITIAL_RATING);
    }
    for i in order {
        let g = records[i];
        // Self-play moves a single rating by +t and -t, which cancels.
        if g.is_self_play() {
            continue;
        }
        let (na, nb) = elo_update(ratings[&g.agent_a], ratings[&g.agent_b], g.outcome.score_a(), K_FACTOR)
            .expect("outcome scores are valid");
        *ratings.get_mut(&g.agent_a).expect("present") = na;
        *ratings.get_mut(&g.agent_b).expect("present") = nb;
    }
    ratings
}

fn game_counts(records: &[&GameRecord]) -> BTreeMap<AgentId, usize> {
    let mut n: BTreeMap<AgentId, usize> = BTreeMap::new();
    for r in records {
        *n.entry(r.agent_a.clone()).or_default() += 1;
        if !r.is_self_play() {
            *n.entry(r.agent_b.clone()).or_default() += 1;
        }
    }
    n
}

fn zero_variance(records: &[&GameRecord]) -> bool {
    let first = records[0].outcome.score_a();
    records.iter().all(|r| r.outcome.score_a() == first) && first == 0.5
}

/// ELO ratings on one axis, all agents starting at 1500.
pub fn run_rating(records: &[GameRecord], axis: Axis, order_seed: u64) -> Result<RatingTable> {
    let recs = axis_records(records, axis);
    if recs.is_empty() {
        return Err(Error::EmptyDataset(format!("no games on axis {axis}")));
    }
    let ratings = rate(&recs, order_seed);
    let counts = game_counts(&recs);
    let mut notes = Vec::new();
    if zero_variance(&recs) {
        notes.push(format!("axis {axis}: every game drawn; zero outcome variance, all ratings stay at 1500"));
    }
    Ok(RatingTable {
        axis,
        rows: ratings
            .into_iter()
            .map(|(a, rating)| RatingRow {
                n_games: counts[&a],
                agent: a.to_string(),
                axis,
                rating,
                boot_sd: None,
                ci_lo: None,
                ci_hi: None,
            })
            .collect(),
        notes,
    })
}

/// Ratings with percentile bootstrap intervals: game outcomes are
/// resampled with replacement within each agent pair, keeping each pair's
/// game count, and re-rated in a fresh random order per replicate.
pub fn bootstrap_ci(records: &[GameRecord], axis: Axis, n_boot: usize, seed: u64) -> Result<RatingTable> {
    if n_boot < 2 {
        return Err(Error::invalid(format!("n_boot = {n_boot} must be >= 2")));
    }
    let mut table = run_rating(records, axis, seed)?;
    let recs = axis_records(records, axis);
    let mut pairs: BTreeMap<(AgentId, AgentId), Vec<&GameRecord>> = BTreeMap::new();
    for r in &recs {
        let key = if r.agent_a <= r.agent_b {
            (r.agent_a.clone(), r.agent_b.clone())
        } else {
            (r.agent_b.clone(), r.agent_a.clone())
        };
        pairs.entry(key).or_default().push(r);
    }
    for ((a, b), games) in &pairs {
        if games.len() == 1 {
            table
                .notes
                .push(format!("pair {a} vs {b}: single game, bootstrap resampling is degenerate"));
        }
    }
    let groups: Vec<&Vec<&GameRecord>> = pairs.values().collect();
    let replicates: Vec<BTreeMap<AgentId, f64>> = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let mut rng = GameRng::substream(seed, b as u64 + 1);
            let mut sample: Vec<&GameRecord> = Vec::with_capacity(recs.len());
            for g in &groups {
                for _ in 0..g.len() {
                    sample.push(g[rng.index(g.len())]);
                }
            }
            rate(&sample, rng.next_seed())
        })
        .collect();
    for row in &mut table.rows {
        let id = AgentId::new(row.agent.clone());
        let xs: Vec<f64> = replicates.iter().map(|m| m[&id]).collect();
        row.boot_sd = Some(sample_sd(&xs));
        row.ci_lo = Some(percentile(&xs, 0.025));
        row.ci_hi = Some(percentile(&xs, 0.975));
    }
    Ok(table)
}

pub fn write_rating_csv(tables: &[RatingTable], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for t in tables {
        for r in &t.rows {
            w.serialize(r)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Smallest `n` with `2 exp(-2 n ε²) <= α`.
pub fn hoeffding_n(eps: f64, alpha: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::invalid(format!("epsilon {eps} outside (0, 0.5]")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(((2.0 / alpha).ln() / (2.0 * eps * eps)).ceil() as u64)
}

/// Win-probability deviation from 0.5 implied by an ELO gap.
pub fn elo_gap_to_eps(gap: f64) -> f64 {
    bt_prob(gap) - 0.5
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerPlan {
    pub elo_gap: f64,
    pub p_star: f64,
    pub eps: f64,
    pub alpha: f64,
    pub n: u64,
}

/// Games needed to detect `elo_gap` at level `alpha`.
pub fn power_plan(elo_gap: f64, alpha: f64) -> Result<PowerPlan> {
    if !(elo_gap > 0.0 && elo_gap.is_finite()) {
        return Err(Error::invalid(format!("ELO gap {elo_gap} must be > 0")));
    }
    let eps = elo_gap_to_eps(elo_gap);
    Ok(PowerPlan {
        elo_gap,
        p_star: bt_prob(elo_gap),
        eps,
        alpha,
        n: hoeffding_n(eps, alpha)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunsTest {
    pub n: usize,
    pub runs: usize,
    pub z: f64,
    pub p: f64,
    /// Only one symbol present; `p` is reported as 1.
    pub degenerate: bool,
}

/// Wald-Wolfowitz runs test with the normal approximation.
pub fn runs_test(seq: &[bool]) -> RunsTest {
    let n = seq.len();
    let runs = if n == 0 { 0 } else { 1 + seq.windows(2).filter(|w| w[0] != w[1]).count() };
    let n1 = seq.iter().filter(|&&x| x).count() as f64;
    let n0 = n as f64 - n1;
    if n1 == 0.0 || n0 == 0.0 {
        return RunsTest {
            n,
            runs,
            z: 0.0,
            p: 1.0,
            degenerate: true,
        };
    }
    let nf = n as f64;
    let mu = 2.0 * n1 * n0 / nf + 1.0;
    let var = (mu - 1.0) * (mu - 2.0) / (nf - 1.0);
    let z = if var > 0.0 { (runs as f64 - mu) / var.sqrt() } else { 0.0 };
    RunsTest {
        n,
        runs,
        z,
        p: if var > 0.0 { normal_two_sided_p(z) } else { 1.0 },
        degenerate: false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRuns {
    pub axis: Axis,
    pub agent_a: String,
    pub agent_b: String,
    pub n: usize,
    pub runs: usize,
    pub z: f64,
    pub p: f64,
    pub degenerate: bool,
}

/// Runs test per pairing on the sequence "first-named agent won", in log order.
/// In self-play the first-named agent is seat A.
pub fn pairing_runs_tests(records: &[GameRecord], axis: Axis) -> Vec<PairRuns> {
    let mut seqs: BTreeMap<(AgentId, AgentId), Vec<bool>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.axis == axis) {
        let swapped = r.agent_b < r.agent_a;
        let key = if swapped {
            (r.agent_b.clone(), r.agent_a.clone())
        } else {
            (r.agent_a.clone(), r.agent_b.clone())
        };
        let first_score = if swapped { 1.0 - r.outcome.score_a() } else { r.outcome.score_a() };
        seqs.entry(key).or_default().push(first_score == 1.0);
    }
    seqs.into_iter()
        .map(|((a, b), s)| {
            let t = runs_test(&s);
            PairRuns {
                axis,
                agent_a: a.to_string(),
                agent_b: b.to_string(),
                n: t.n,
                runs: t.runs,
                z: t.z,
                p: t.p,
                degenerate: t.degenerate,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bt_examples() {
        assert_eq!(bt_prob(0.0), 0.5);
        assert!((bt_prob(50.0) - 0.5715).abs() < 1e-3);
        // slope at 0 is ln(10)/1600, i.e. Δ ≈ 694.9 (p - 0.5)
        let slope = (bt_prob(1e-4) - bt_prob(-1e-4)) / 2e-4;
        assert!((1.0 / slope - 1600.0 / 10f64.ln()).abs() < 1e-3);
        assert!((1.0 / slope - 694.0).abs() < 1.0);
    }

    #[test]
    fn update_examples() {
        assert_eq!(elo_update(1500.0, 1500.0, 1.0, 32.0).unwrap(), (1516.0, 1484.0));
        assert_eq!(elo_update(1500.0, 1500.0, 0.5, 32.0).unwrap(), (1500.0, 1500.0));
        assert!(elo_update(1500.0, 1500.0, 0.7, 32.0).is_err());
        assert!(elo_update(1500.0, 1500.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_n(0.072, 0.05).unwrap(), 356);
        assert!((elo_gap_to_eps(50.0) - 0.072).abs() < 1e-3);
        let mut prev = 0;
        for eps in [0.4, 0.1, 0.01, 0.001] {
            let n = hoeffding_n(eps, 0.05).unwrap();
            assert!(n > prev);
            prev = n;
        }
        assert!(hoeffding_n(0.0, 0.05).is_err());
        assert!(hoeffding_n(0.1, 1.0).is_err());
    }

    #[test]
    fn runs_closed_forms() {
        let alt: Vec<bool> = (0..20).map(|i| i % 2 == 1).collect();
        let t = runs_test(&alt);
        assert_eq!(t.runs, 20);
        // μ = 11, σ² = 10·9/19
        assert!((t.z - 9.0 / (90.0f64 / 19.0).sqrt()).abs() < 1e-12);
        assert!(t.p < 0.001);
        let blocks: Vec<bool> = (0..20).map(|i| i < 10).collect();
        let t = runs_test(&blocks);
        assert_eq!(t.runs, 2);
        assert!(t.p < 0.001);
        let t = runs_test(&[true; 12]);
        assert!(t.degenerate && t.p == 1.0);
    }
}
