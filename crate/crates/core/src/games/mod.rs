//! Game engines.
//!
//! Each engine is a sequential state machine over rounds: it builds an
//! observation per seat, asks the seat's policy for an action, scores the
//! round with the kind's payoff rule and appends it to the trace.

pub mod auction;
pub mod dixit;
pub mod rpd;
pub mod sc;
pub mod stst;

use crate::agents::external::fallback_action;
use crate::agents::{decide, AgentSpec, Context, Decision, HttpTransport, Observation, Role, Transport};
use crate::conditions::{ConditionPayload, ConditionSet};
use crate::error::{Error, Result};
use crate::record::{Action, GameRecord, Outcome, PrivateState, RoundFlags, RoundRecord};
use crate::rng::GameRng;
use crate::types::{GameKind, Seat};

use self::sc::ScMove;
use self::stst::Vocabulary;

/// Plays games between two agent specs.
pub struct GameEngine<'t> {
    transport: &'t dyn Transport,
}

impl Default for GameEngine<'static> {
    fn default() -> Self {
        GameEngine::new(&HttpTransport)
    }
}

struct Table<'a> {
    kind: GameKind,
    agents: [&'a AgentSpec; 2],
    rngs: [GameRng; 2],
    rounds: Vec<RoundRecord>,
    scores: [f64; 2],
    transport: &'a dyn Transport,
}

enum Step {
    Both([Action; 2]),
    Forfeit { seat: Seat, actions: [Action; 2] },
}

impl<'a> Table<'a> {
    fn ask(&mut self, seat: Seat, role: Role, round: u32, private: PrivateState, context: Context<'_>) -> Decision {
        let i = seat.index();
        let obs = Observation {
            kind: self.kind,
            seat,
            role,
            round,
            private,
            history: &self.rounds,
            scores: self.scores,
            context,
        };
        decide(self.agents[i], &obs, &mut self.rngs[i], self.transport)
    }

    fn fallback(&self, seat: Seat, role: Role, round: u32, private: PrivateState, context: Context<'_>) -> Action {
        fallback_action(&Observation {
            kind: self.kind,
            seat,
            role,
            round,
            private,
            history: &self.rounds,
            scores: self.scores,
            context,
        })
    }

    /// Simultaneous move: both seats see the same history.
    fn simultaneous(&mut self, round: u32, private: [PrivateState; 2], context: Context<'_>) -> Step {
        let a = match self.ask(Seat::A, Role::Player, round, private[0].clone(), context) {
            Decision::Act(a) => a,
            Decision::Forfeit(_) => {
                let b = self.fallback(Seat::B, Role::Player, round, private[1].clone(), context);
                return Step::Forfeit { seat: Seat::A, actions: [Action::Forfeit, b] };
            }
        };
        match self.ask(Seat::B, Role::Player, round, private[1].clone(), context) {
            Decision::Act(b) => Step::Both([a, b]),
            Decision::Forfeit(_) => Step::Forfeit { seat: Seat::B, actions: [a, Action::Forfeit] },
        }
    }

    fn push(&mut self, record: RoundRecord) {
        self.scores[0] += record.payoffs[0];
        self.scores[1] += record.payoffs[1];
        self.rounds.push(record);
    }

    fn push_forfeit(&mut self, round: u32, private: [PrivateState; 2], seat: Seat, actions: [Action; 2]) {
        self.push(RoundRecord {
            round,
            private,
            actions,
            payoffs: [0.0, 0.0],
            flags: RoundFlags::default(),
            distance: None,
            forfeit: Some(seat),
        });
    }
}

fn rejected(seat: Seat, action: &Action) -> Error {
    Error::RejectedAction {
        seat,
        reason: format!("unexpected action {action:?}"),
    }
}

impl<'t> GameEngine<'t> {
    pub fn new(transport: &'t dyn Transport) -> Self {
        GameEngine { transport }
    }

    /// Plays one game. Seat `i` draws from substream `i` of `seed`.
    pub fn play(
        &self,
        condition: &ConditionSet,
        agent_a: &AgentSpec,
        agent_b: &AgentSpec,
        seed: u64,
    ) -> Result<GameRecord> {
        condition.validate()?;
        agent_a.validate()?;
        agent_b.validate()?;
        let kind = condition.game_kind;
        let mut t = Table {
            kind,
            agents: [agent_a, agent_b],
            rngs: [GameRng::substream(seed, 0), GameRng::substream(seed, 1)],
            rounds: Vec::new(),
            scores: [0.0, 0.0],
            transport: self.transport,
        };
        match &condition.payload {
            ConditionPayload::StrategicClaim { values } => play_sc(&mut t, values)?,
            ConditionPayload::RepeatedPd { horizon } => play_rpd(&mut t, *horizon)?,
            ConditionPayload::SayTheSameThing { start, .. } => play_stst(&mut t, start)?,
            ConditionPayload::TextDixit { rounds } => play_dixit(&mut t, rounds)?,
            ConditionPayload::Auction { values } => play_auction(&mut t, *values)?,
        }
        let [score_a, score_b] = t.scores;
        Ok(GameRecord {
            game_kind: kind,
            axis: kind.axis(),
            condition_index: condition.index,
            agent_a: agent_a.id.clone(),
            agent_b: agent_b.id.clone(),
            seed,
            rounds: t.rounds,
            score_a,
            score_b,
            outcome: Outcome::from_scores(score_a, score_b),
        })
    }
}

/// Plays one game over HTTP-capable transport.
pub fn run_game(
    kind: GameKind,
    condition: &ConditionSet,
    agent_a: &AgentSpec,
    agent_b: &AgentSpec,
    seed: u64,
) -> Result<GameRecord> {
    if condition.game_kind != kind {
        return Err(Error::invalid(format!(
            "condition {} is for {:?}, not {kind:?}",
            condition.index, condition.game_kind
        )));
    }
    GameEngine::default().play(condition, agent_a, agent_b, seed)
}

fn play_sc(t: &mut Table<'_>, values: &[[u8; 2]]) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        let round = i as u32 + 1;
        let private = [PrivateState::Value { value: v[0] }, PrivateState::Value { value: v[1] }];
        let actions = match t.simultaneous(round, private.clone(), Context::None) {
            Step::Both(a) => a,
            Step::Forfeit { seat, actions } => {
                t.push_forfeit(round, private, seat, actions);
                return Ok(());
            }
        };
        let mv = |s: usize| match actions[s] {
            Action::Claim { claim, threshold } => Ok(ScMove::new(v[s], claim, threshold)),
            ref a => Err(rejected(Seat::from_index(s), a)),
        };
        let (ma, mb) = (mv(0)?, mv(1)?);
        let (pa, pb) = sc::sc_round_payoff(ma, mb)?;
        let flags = RoundFlags {
            bluffed: [ma.is_bluff(), mb.is_bluff()],
            challenged: [sc::challenges(mb.threshold, ma.claim), sc::challenges(ma.threshold, mb.claim)],
            ..RoundFlags::default()
        };
        t.push(RoundRecord {
            round,
            private,
            actions,
            payoffs: [pa, pb],
            flags,
            distance: None,
            forfeit: None,
        });
    }
    Ok(())
}

fn play_rpd(t: &mut Table<'_>, horizon: u32) -> Result<()> {
    for round in 1..=horizon {
        let private = [PrivateState::None, PrivateState::None];
        let actions = match t.simultaneous(round, private.clone(), Context::None) {
            Step::Both(a) => a,
            Step::Forfeit { seat, actions } => {
                t.push_forfeit(round, private, seat, actions);
                return Ok(());
            }
        };
        let mv = |s: usize| match actions[s] {
            Action::Move { mv, .. } => Ok(mv),
            ref a => Err(rejected(Seat::from_index(s), a)),
        };
        let (ma, mb) = (mv(0)?, mv(1)?);
        let (pa, pb) = rpd::rpd_payoff(ma, mb);
        let flags = RoundFlags {
            cooperated: [ma == crate::record::Move::C, mb == crate::record::Move::C],
            ..RoundFlags::default()
        };
        t.push(RoundRecord {
            round,
            private,
            actions,
            payoffs: [pa, pb],
            flags,
            distance: None,
            forfeit: None,
        });
    }
    Ok(())
}

fn play_stst(t: &mut Table<'_>, start: &[String; 2]) -> Result<()> {
    let vocab = Vocabulary::standard();
    let mut previous = [vocab.resolve(&start[0]), vocab.resolve(&start[1])];
    for round in 1..=stst::MAX_ROUNDS {
        let private = [PrivateState::None, PrivateState::None];
        let actions = match t.simultaneous(round, private.clone(), Context::Stst { previous }) {
            Step::Both(a) => a,
            Step::Forfeit { seat, actions } => {
                t.push_forfeit(round, private, seat, actions);
                return Ok(());
            }
        };
        let word = |s: usize| match &actions[s] {
            Action::Word { word } => vocab
                .index_of(word)
                .ok_or_else(|| Error::RejectedAction {
                    seat: Seat::from_index(s),
                    reason: format!("word `{word}` outside vocabulary"),
                }),
            a => Err(rejected(Seat::from_index(s), a)),
        };
        let (wa, wb) = (word(0)?, word(1)?);
        let matched = wa == wb;
        let p = if matched { stst::stst_payoff(Some(round))? } else { 0.0 };
        t.push(RoundRecord {
            round,
            private,
            actions,
            payoffs: [p, p],
            flags: RoundFlags {
                matched,
                ..RoundFlags::default()
            },
            distance: Some(vocab.distance(wa, wb)),
            forfeit: None,
        });
        if matched {
            break;
        }
        previous = [wa, wb];
    }
    Ok(())
}

/// Seat telling the story in `round` (A in odd rounds).
pub fn dixit_storyteller(round: u32) -> Seat {
    if round % 2 == 1 {
        Seat::A
    } else {
        Seat::B
    }
}

fn play_dixit(t: &mut Table<'_>, rounds: &[dixit::DixitRound]) -> Result<()> {
    for (i, dr) in rounds.iter().enumerate() {
        let round = i as u32 + 1;
        let st = dixit_storyteller(round);
        let gs = st.other();
        let mut private = [PrivateState::None, PrivateState::None];
        private[st.index()] = PrivateState::Target { target: dr.target };

        let story_ctx = Context::DixitStory { round: dr };
        let story = match t.ask(st, Role::Storyteller, round, private[st.index()].clone(), story_ctx) {
            Decision::Act(a) => a,
            Decision::Forfeit(_) => {
                let mut actions = [Action::Forfeit, Action::Forfeit];
                let story = t.fallback(st, Role::Storyteller, round, private[st.index()].clone(), story_ctx);
                if let Action::Story { clue, .. } = &story {
                    let ctx = Context::DixitGuess { scenes: &dr.scenes, clue };
                    actions[gs.index()] = t.fallback(gs, Role::Guesser, round, PrivateState::None, ctx);
                }
                t.push_forfeit(round, private, st, actions);
                return Ok(());
            }
        };
        let (clue, predicted) = match &story {
            Action::Story { clue, predicted_confidence } => (clue.clone(), *predicted_confidence),
            a => return Err(rejected(st, a)),
        };
        let guess_ctx = Context::DixitGuess { scenes: &dr.scenes, clue: &clue };
        let guess = match t.ask(gs, Role::Guesser, round, PrivateState::None, guess_ctx) {
            Decision::Act(a) => a,
            Decision::Forfeit(_) => {
                let mut actions = [Action::Forfeit, Action::Forfeit];
                actions[st.index()] = story;
                t.push_forfeit(round, private, gs, actions);
                return Ok(());
            }
        };
        let (g, reported) = match guess {
            Action::Guess { guess, confidence } => (guess, confidence),
            ref a => return Err(rejected(gs, a)),
        };
        let mut payoffs = [0.0, 0.0];
        payoffs[st.index()] = dixit::dixit_score(predicted, reported)?;
        let mut actions = [Action::Forfeit, Action::Forfeit];
        actions[st.index()] = story;
        actions[gs.index()] = guess;
        t.push(RoundRecord {
            round,
            private,
            actions,
            payoffs,
            flags: RoundFlags {
                matched: g == dr.target,
                ..RoundFlags::default()
            },
            distance: None,
            forfeit: None,
        });
    }
    Ok(())
}

fn play_auction(t: &mut Table<'_>, values: [f64; 2]) -> Result<()> {
    let private = [
        PrivateState::AuctionValue { value: values[0] },
        PrivateState::AuctionValue { value: values[1] },
    ];
    let actions = match t.simultaneous(1, private.clone(), Context::None) {
        Step::Both(a) => a,
        Step::Forfeit { seat, actions } => {
            t.push_forfeit(1, private, seat, actions);
            return Ok(());
        }
    };
    let bid = |s: usize| match actions[s] {
        Action::Bid { bid } => Ok(bid),
        ref a => Err(rejected(Seat::from_index(s), a)),
    };
    let (pa, pb) = auction::auction_settle(values[0], bid(0)?, values[1], bid(1)?)?;
    t.push(RoundRecord {
        round: 1,
        private,
        actions,
        payoffs: [pa, pb],
        flags: RoundFlags::default(),
        distance: None,
        forfeit: None,
    });
    Ok(())
}

/// Recomputes both scores from the recorded actions with the payoff rules.
pub fn replay_scores(record: &GameRecord) -> Result<(f64, f64)> {
    let vocab = Vocabulary::standard();
    let mut total = [0.0, 0.0];
    for r in &record.rounds {
        if r.forfeit.is_some() {
            continue;
        }
        let (pa, pb) = match (&r.actions, &r.private) {
            (
                [Action::Claim { claim: ca, threshold: ta }, Action::Claim { claim: cb, threshold: tb }],
                [PrivateState::Value { value: va }, PrivateState::Value { value: vb }],
            ) => sc::sc_round_payoff(ScMove::new(*va, *ca, *ta), ScMove::new(*vb, *cb, *tb))?,
            ([Action::Move { mv: a, .. }, Action::Move { mv: b, .. }], _) => rpd::rpd_payoff(*a, *b),
            ([Action::Word { word: a }, Action::Word { word: b }], _) => {
                if vocab.resolve(a) == vocab.resolve(b) {
                    let p = stst::stst_payoff(Some(r.round))?;
                    (p, p)
                } else {
                    (0.0, 0.0)
                }
            }
            ([Action::Story { predicted_confidence, .. }, Action::Guess { confidence, .. }], _) => {
                (dixit::dixit_score(*predicted_confidence, *confidence)?, 0.0)
            }
            ([Action::Guess { confidence, .. }, Action::Story { predicted_confidence, .. }], _) => {
                (0.0, dixit::dixit_score(*predicted_confidence, *confidence)?)
            }
            (
                [Action::Bid { bid: ba }, Action::Bid { bid: bb }],
                [PrivateState::AuctionValue { value: va }, PrivateState::AuctionValue { value: vb }],
            ) => auction::auction_settle(*va, *ba, *vb, *bb)?,
            _ => {
                return Err(Error::Validation {
                    line: 0,
                    round: r.round,
                    message: "actions do not match a game kind".into(),
                })
            }
        };
        total[0] += pa;
        total[1] += pb;
    }
    Ok((total[0], total[1]))
}
