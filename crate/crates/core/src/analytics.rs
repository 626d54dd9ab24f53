//! Round-block equilibrium convergence, exponential contraction fits and
//! cross-axis correlation statistics.

use std::path::Path;

use serde::Serialize;

use crate::equilibrium::sc_conditional_bluff_rate;
use crate::error::{Error, Result};
use crate::rating::RatingTable;
use crate::record::{Action, GameRecord, Move, PrivateState};
use crate::rng::GameRng;
use crate::stats::{average_ranks, pearson, t_two_sided_p};
use crate::types::{Axis, GameKind};

pub const DEFAULT_BLOCK: u32 = 2;
/// Behavioural cooperation reference; not an equilibrium prediction.
pub const COOPERATION_REFERENCE: f64 = 0.70;
pub const LOG_FLOOR: f64 = 1e-6;
pub const PERMUTATIONS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockStats {
    pub block: u32,
    pub first_round: u32,
    pub last_round: u32,
    /// Low-value (`v <= 3`) sender decisions in the block.
    pub bluff_n: usize,
    pub bluff_rate: Option<f64>,
    pub bluff_se: Option<f64>,
    pub gap_beta: Option<f64>,
    pub coop_n: usize,
    pub coop_rate: Option<f64>,
    pub coop_se: Option<f64>,
    pub gap_c: Option<f64>,
    /// Percent reduction of the bluff gap relative to block 1.
    pub convergence_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpFit {
    pub rho: f64,
    pub amplitude: f64,
    /// Absent when the gaps have no variance.
    pub r2: Option<f64>,
    pub adj_r2: Option<f64>,
    pub non_contracting: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub block_size: u32,
    pub beta_star: f64,
    pub coop_reference: f64,
    pub coop_reference_label: String,
    pub blocks: Vec<BlockStats>,
    /// Fit of the bluff gaps over the defined blocks.
    pub fit: Option<ExpFit>,
    /// The fit summarizes the decay shape; it is not a precise rate estimate.
    pub fit_is_illustrative: bool,
}

fn binomial(k: usize, n: usize) -> (Option<f64>, Option<f64>) {
    if n == 0 {
        return (None, None);
    }
    let p = k as f64 / n as f64;
    (Some(p), Some((p * (1.0 - p) / n as f64).sqrt()))
}

/// Per-block conditional bluff rates (SC) and cooperation rates (RPD).
pub fn block_convergence(records: &[GameRecord], block: u32) -> Result<ConvergenceReport> {
    if block == 0 {
        return Err(Error::invalid("block size must be >= 1"));
    }
    let used: Vec<&GameRecord> = records
        .iter()
        .filter(|r| matches!(r.game_kind, GameKind::StrategicClaim | GameKind::RepeatedPD))
        .collect();
    if used.is_empty() {
        return Err(Error::EmptyDataset("no Strategic Claim or Repeated PD games".into()));
    }
    let max_round = used.iter().flat_map(|r| r.rounds.iter().map(|x| x.round)).max().unwrap_or(0);
    let nblocks = max_round.div_ceil(block) as usize;
    let mut bluffs = vec![(0usize, 0usize); nblocks];
    let mut coops = vec![(0usize, 0usize); nblocks];
    for r in &used {
        for round in r.rounds.iter().filter(|x| x.forfeit.is_none()) {
            let b = ((round.round - 1) / block) as usize;
            for s in 0..2 {
                match (&round.actions[s], &round.private[s]) {
                    (Action::Claim { claim, .. }, PrivateState::Value { value }) if *value <= 3 => {
                        bluffs[b].1 += 1;
                        bluffs[b].0 += usize::from(claim > value);
                    }
                    (Action::Move { mv, .. }, _) => {
                        coops[b].1 += 1;
                        coops[b].0 += usize::from(*mv == Move::C);
                    }
                    _ => {}
                }
            }
        }
    }
    let beta_star = sc_conditional_bluff_rate();
    let mut blocks: Vec<BlockStats> = (0..nblocks)
        .map(|b| {
            let (bluff_rate, bluff_se) = binomial(bluffs[b].0, bluffs[b].1);
            let (coop_rate, coop_se) = binomial(coops[b].0, coops[b].1);
            BlockStats {
                block: b as u32 + 1,
                first_round: b as u32 * block + 1,
                last_round: (b as u32 + 1) * block,
                bluff_n: bluffs[b].1,
                bluff_rate,
                bluff_se,
                gap_beta: bluff_rate.map(|x| (x - beta_star).abs()),
                coop_n: coops[b].1,
                coop_rate,
                coop_se,
                gap_c: coop_rate.map(|x| (x - COOPERATION_REFERENCE).abs()),
                convergence_pct: None,
            }
        })
        .collect();
    if let Some(g1) = blocks.first().and_then(|b| b.gap_beta).filter(|&g| g > 0.0) {
        for b in &mut blocks {
            b.convergence_pct = b.gap_beta.map(|g| 100.0 * (g1 - g) / g1);
        }
    }
    let gaps: Vec<f64> = blocks.iter().filter_map(|b| b.gap_beta).collect();
    let fit = if gaps.len() >= 3 { Some(exp_fit(&gaps)?) } else { None };
    Ok(ConvergenceReport {
        block_size: block,
        beta_star,
        coop_reference: COOPERATION_REFERENCE,
        coop_reference_label: "behavioral reference".into(),
        blocks,
        fit,
        fit_is_illustrative: true,
    })
}

/// Fits `g_b = A ρ^(b-1)` by least squares on `ln max(g_b, 1e-6)`.
pub fn exp_fit(gaps: &[f64]) -> Result<ExpFit> {
    let n = gaps.len();
    if n < 3 {
        return Err(Error::invalid(format!("exponential fit needs >= 3 blocks, got {n}")));
    }
    if gaps.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
        return Err(Error::invalid("gaps must be finite and >= 0"));
    }
    let xs: Vec<f64> = (0..n).map(|b| b as f64).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.max(LOG_FLOOR).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rho = slope.exp();
    let amplitude = (my - slope * mx).exp();
    let mg = gaps.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = gaps.iter().map(|g| (g - mg).powi(2)).sum();
    let ss_res: f64 = gaps
        .iter()
        .enumerate()
        .map(|(b, g)| (g - amplitude * rho.powi(b as i32)).powi(2))
        .sum();
    let r2 = (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
    let adj_r2 = r2.map(|r| 1.0 - (1.0 - r) * (n as f64 - 1.0) / (n as f64 - 2.0));
    Ok(ExpFit {
        rho,
        amplitude,
        r2,
        adj_r2,
        non_contracting: rho >= 1.0,
    })
}

/// Per-block convergence CSV.
pub fn write_convergence_csv(report: &ConvergenceReport, path: impl AsRef<Path>) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        block: u32,
        bluff_rate: Option<f64>,
        bluff_se: Option<f64>,
        gap_beta: Option<f64>,
        coop_rate: Option<f64>,
        coop_se: Option<f64>,
        gap_c: Option<f64>,
        convergence_pct: Option<f64>,
    }
    let mut w = csv::Writer::from_path(path)?;
    for b in &report.blocks {
        w.serialize(Row {
            block: b.block,
            bluff_rate: b.bluff_rate,
            bluff_se: b.bluff_se,
            gap_beta: b.gap_beta,
            coop_rate: b.coop_rate,
            coop_se: b.coop_se,
            gap_c: b.gap_c,
            convergence_pct: b.convergence_pct,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Two-sided t-test p for a Pearson `r` over `n` points.
pub fn pearson_p(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = n as f64 - 2.0;
    t_two_sided_p(r * (df / (1.0 - r * r)).sqrt(), df)
}

/// `(1 + #{|r_perm| >= |r|}) / (permutations + 1)` over seeded shuffles of `y`.
pub fn permutation_p(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Option<f64> {
    let r = pearson(x, y)?;
    let mut rng = GameRng::new(seed);
    let mut yy = y.to_vec();
    let mut hits = 0usize;
    for _ in 0..permutations {
        rng.shuffle(&mut yy);
        if pearson(x, &yy).is_some_and(|rp| rp.abs() >= r.abs() - 1e-12) {
            hits += 1;
        }
    }
    Some((1 + hits) as f64 / (permutations + 1) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrEntry {
    pub axis_x: Axis,
    pub axis_y: Axis,
    pub n: usize,
    /// Absent when either column is constant.
    pub r: Option<f64>,
    pub p_t: Option<f64>,
    pub p_perm: Option<f64>,
    pub loo_min: Option<f64>,
    pub loo_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrMatrix {
    pub agents: Vec<String>,
    pub axes: Vec<Axis>,
    /// `r[i][j]` between `axes[i]` and `axes[j]`; `None` when undefined.
    pub r: Vec<Vec<Option<f64>>>,
    pub pairs: Vec<CorrEntry>,
    /// Correlations of the control axis with every other axis.
    pub control: Vec<CorrEntry>,
}

fn corr_entry(ax: Axis, ay: Axis, x: &[f64], y: &[f64], seed: u64) -> CorrEntry {
    let n = x.len();
    let r = pearson(x, y);
    let loo: Vec<f64> = (0..n)
        .filter_map(|k| {
            let xs: Vec<f64> = x.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, v)| *v).collect();
            let ys: Vec<f64> = y.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, v)| *v).collect();
            pearson(&xs, &ys)
        })
        .collect();
    CorrEntry {
        axis_x: ax,
        axis_y: ay,
        n,
        r,
        p_t: r.map(|r| pearson_p(r, n)),
        p_perm: permutation_p(x, y, PERMUTATIONS, seed),
        loo_min: (!loo.is_empty()).then(|| loo.iter().copied().fold(f64::INFINITY, f64::min)),
        loo_max: (!loo.is_empty()).then(|| loo.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    }
}

/// Cross-axis ELO correlations over the agents rated on every axis.
pub fn correlations(tables: &[RatingTable], control: Option<Axis>, seed: u64) -> Result<CorrMatrix> {
    let social: Vec<&RatingTable> = tables.iter().filter(|t| Some(t.axis) != control).collect();
    let mut agents: Vec<String> = tables
        .first()
        .map(|t| t.rows.iter().map(|r| r.agent.clone()).collect())
        .unwrap_or_default();
    agents.retain(|a| tables.iter().all(|t| t.row(a).is_some()));
    agents.sort();
    if agents.len() < 4 {
        return Err(Error::invalid(format!(
            "correlations need >= 4 agents rated on every axis, got {}",
            agents.len()
        )));
    }
    let column = |t: &RatingTable| -> Vec<f64> { agents.iter().map(|a| t.rating(a).expect("filtered")).collect() };
    let cols: Vec<Vec<f64>> = social.iter().map(|t| column(t)).collect();
    let axes: Vec<Axis> = social.iter().map(|t| t.axis).collect();
    let k = axes.len();
    let mut r = vec![vec![None; k]; k];
    let mut pairs = Vec::new();
    for i in 0..k {
        r[i][i] = Some(1.0);
        for j in i + 1..k {
            let e = corr_entry(axes[i], axes[j], &cols[i], &cols[j], seed ^ ((i * k + j) as u64));
            r[i][j] = e.r;
            r[j][i] = e.r;
            pairs.push(e);
        }
    }
    let control_row = match control.and_then(|c| tables.iter().find(|t| t.axis == c)) {
        Some(ct) => {
            let cc = column(ct);
            (0..k)
                .map(|i| corr_entry(ct.axis, axes[i], &cc, &cols[i], seed ^ (0xC0 + i as u64)))
                .collect()
        }
        None => Vec::new(),
    };
    Ok(CorrMatrix {
        agents,
        axes,
        r,
        pairs,
        control: control_row,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpearmanResult {
    pub n: usize,
    /// Absent when either input is constant.
    pub rho: Option<f64>,
    pub p_perm: Option<f64>,
}

/// Rank correlation with average ranks for ties and a permutation p-value.
pub fn spearman(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<SpearmanResult> {
    if x.len() != y.len() {
        return Err(Error::invalid("spearman inputs differ in length"));
    }
    if x.len() < 4 {
        return Err(Error::invalid(format!("spearman needs n >= 4, got {}", x.len())));
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    Ok(SpearmanResult {
        n: x.len(),
        rho: pearson(&rx, &ry),
        p_perm: permutation_p(&rx, &ry, permutations, seed),
    })
}
