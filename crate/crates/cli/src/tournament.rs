//! Round-robin tournaments over agent pairings.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use tomgame_core::{
    derive_seed, sample_conditions, write_log, AgentSpec, GameEngine, GameKind, GameRecord, Result,
};

use crate::bundle::{Bundle, FileEntry};
use crate::config::TournamentConfig;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KindSummary {
    pub game_kind: String,
    pub log: String,
    pub replications: usize,
    pub games: usize,
    pub forfeits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameEntry {
    pub game_kind: String,
    pub agent_a: String,
    pub agent_b: String,
    pub replication: usize,
    pub condition_index: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TournamentManifest {
    pub software: String,
    pub version: String,
    pub master_seed: u64,
    pub condition_count: usize,
    pub include_self_play: bool,
    pub pairings: usize,
    pub total_games: usize,
    pub agents: Vec<AgentSpec>,
    pub kinds: Vec<KindSummary>,
    pub games: Vec<GameEntry>,
    pub files: Vec<FileEntry>,
}

#[derive(Clone, Debug)]
pub struct TournamentSummary {
    pub manifest: TournamentManifest,
    /// Records per kind, in schedule order.
    pub records: BTreeMap<GameKind, Vec<GameRecord>>,
}

impl TournamentSummary {
    pub fn all_records(&self) -> Vec<GameRecord> {
        self.records.values().flatten().cloned().collect()
    }
}

struct Job {
    kind: GameKind,
    a: usize,
    b: usize,
    replication: usize,
    condition_index: usize,
    seed: u64,
}

/// Runs every (pairing, kind, replication) game and writes one JSONL log per
/// kind plus a manifest into `config.output_dir`. Replication `r` plays
/// condition `r mod condition_count`, so all pairings share condition sets.
pub fn run_tournament(config: &TournamentConfig) -> Result<TournamentSummary> {
    config.validate()?;
    let kinds = config.kinds()?;
    let pairings = config.pairings();
    let engine = GameEngine::default();
    let mut bundle = Bundle::create(&config.output_dir)?;
    let mut records = BTreeMap::new();
    let mut kind_rows = Vec::new();
    let mut games = Vec::new();
    for &kind in &kinds {
        let reps = config.replications_for(kind);
        let conditions = sample_conditions(kind, config.master_seed, config.condition_count)?;
        let jobs: Vec<Job> = pairings
            .iter()
            .flat_map(|&(a, b)| {
                (0..reps).map(move |replication| (a, b, replication))
            })
            .map(|(a, b, replication)| {
                let condition_index = replication % config.condition_count;
                Job {
                    kind,
                    a,
                    b,
                    replication,
                    condition_index,
                    seed: derive_seed(
                        config.master_seed,
                        kind,
                        condition_index,
                        &config.agents[a].id,
                        &config.agents[b].id,
                        replication,
                    ),
                }
            })
            .collect();
        let played: Vec<GameRecord> = jobs
            .par_iter()
            .map(|j| {
                engine.play(
                    &conditions[j.condition_index],
                    &config.agents[j.a],
                    &config.agents[j.b],
                    j.seed,
                )
            })
            .collect::<Result<_>>()?;
        let log = format!("{}.jsonl", kind.short());
        write_log(&played, bundle.track(&log))?;
        games.extend(jobs.iter().map(|j| GameEntry {
            game_kind: j.kind.short().to_string(),
            agent_a: config.agents[j.a].id.to_string(),
            agent_b: config.agents[j.b].id.to_string(),
            replication: j.replication,
            condition_index: j.condition_index,
            seed: j.seed,
        }));
        kind_rows.push(KindSummary {
            game_kind: kind.short().to_string(),
            log,
            replications: reps,
            games: played.len(),
            forfeits: played.iter().filter(|r| r.forfeited().is_some()).count(),
        });
        records.insert(kind, played);
    }
    let manifest = TournamentManifest {
        software: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: config.master_seed,
        condition_count: config.condition_count,
        include_self_play: config.include_self_play,
        pairings: pairings.len(),
        total_games: games.len(),
        agents: config.agents.clone(),
        kinds: kind_rows,
        games,
        files: bundle.entries()?,
    };
    bundle.write_json(MANIFEST, &manifest)?;
    Ok(TournamentSummary { manifest, records })
}
