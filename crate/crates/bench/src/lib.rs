//! Shared fixtures for the benchmarks.

use tomgame_core::estimation::{synthetic_dataset, ChoiceDataset, DatasetOptions, Generator};
use tomgame_core::{run_game, AgentKind, AgentSpec, ConditionSet, GameKind, GameRecord};

/// SC choice data from a QRE agent at `lambda`.
pub fn choice_data(lambda: f64, n: usize) -> ChoiceDataset {
    synthetic_dataset(Generator::Qre(lambda), n, 1, DatasetOptions::default()).expect("valid size")
}

/// A round robin of four synthetic agents on one game kind, `reps` games per pairing.
pub fn round_robin(kind: GameKind, reps: usize) -> Vec<GameRecord> {
    let agents = [
        AgentSpec::new("nash", AgentKind::Nash),
        AgentSpec::new("random", AgentKind::Random),
        AgentSpec::new("qre-1", AgentKind::Qre { lambda: 1.0 }),
        AgentSpec::new("qre-2", AgentKind::Qre { lambda: 2.0 }),
    ];
    let mut out = Vec::new();
    for i in 0..agents.len() {
        for j in i..agents.len() {
            for r in 0..reps {
                let cond = ConditionSet::generate(kind, 9, r);
                out.push(run_game(kind, &cond, &agents[i], &agents[j], (i * 100 + j * 10 + r) as u64).expect("valid game"));
            }
        }
    }
    out
}
