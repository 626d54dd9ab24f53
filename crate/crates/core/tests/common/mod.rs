#![allow(dead_code)]

use tomgame_core::*;

/// Minimal record carrying only what rating consumes: axis, agents and outcome.
pub fn outcome_record(axis: Axis, a: &str, b: &str, outcome: Outcome, seed: u64) -> GameRecord {
    let (score_a, score_b) = match outcome {
        Outcome::WinA => (1.0, 0.0),
        Outcome::WinB => (0.0, 1.0),
        Outcome::Draw => (0.5, 0.5),
    };
    GameRecord {
        game_kind: axis.game_kind(),
        axis,
        condition_index: 0,
        agent_a: AgentId::new(a),
        agent_b: AgentId::new(b),
        seed,
        rounds: Vec::new(),
        score_a,
        score_b,
        outcome,
    }
}

/// All SC games between the given agents (including self-play) over `reps` conditions.
pub fn sc_tournament(agents: &[AgentSpec], reps: usize, master: u64) -> Vec<GameRecord> {
    let mut out = Vec::new();
    for i in 0..agents.len() {
        for j in i..agents.len() {
            for rep in 0..reps {
                let cond = ConditionSet::generate(GameKind::StrategicClaim, master, rep);
                let seed = derive_seed(master, GameKind::StrategicClaim, rep, &agents[i].id, &agents[j].id, rep);
                out.push(run_game(GameKind::StrategicClaim, &cond, &agents[i], &agents[j], seed).unwrap());
            }
        }
    }
    out
}
