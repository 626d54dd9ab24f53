//! Adapter for remote decision services.
//!
//! Each decision is one stateless request carrying the full game history:
//!
//! ```json
//! {"game_kind": "sc", "role": "player", "round": 3,
//!  "private_state": {"seat": "a", "value": 2},
//!  "legal_actions": {"claim": [2, 6], "threshold": [1, 7]},
//!  "history": [...], "scores": {"own": 4.0, "opponent": 1.0}}
//! ```
//!
//! Replies are per-kind action objects: `{claim, threshold}`, `{move, message}`,
//! `{word}`, `{clue, predicted_confidence}`, `{guess, confidence}` or `{bid}`.
//! An illegal reply is retried with an `error_note` field added to the
//! envelope; once the budget is spent the documented default action is used.
//! Transport failures that outlast the budget forfeit the game.

use std::fmt;
use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::agents::{Context, Decision, Observation, Role};
use crate::games::dixit::{self, DixitRound};
use crate::games::sc::{MAX_VALUE, NEVER_CHALLENGE};
use crate::games::stst::Vocabulary;
use crate::record::{Action, Move, PrivateState};
use crate::types::{GameKind, Seat};

/// Confidence used by default Dixit actions.
pub const FALLBACK_CONFIDENCE: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub enum TransportError {
    Timeout,
    Unreachable(String),
    /// The service answered, but not with a JSON object.
    Malformed(String),
}

impl fmt::Display for TransportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransportError::Timeout => write!(f, "timed out"),
            TransportError::Unreachable(m) => write!(f, "unreachable: {m}"),
            TransportError::Malformed(m) => write!(f, "malformed reply: {m}"),
        }
    }
}

impl std::error::Error for TransportError {}

/// Request/response channel to an external agent.
pub trait Transport: Send + Sync {
    fn exchange(&self, endpoint: &str, envelope: &Value, timeout: Duration) -> Result<Value, TransportError>;
}

/// Blocking HTTP POST of the envelope as JSON.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn exchange(&self, endpoint: &str, envelope: &Value, timeout: Duration) -> Result<Value, TransportError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        let mut resp = agent
            .post(endpoint)
            .header("content-type", "application/json")
            .send(envelope.to_string())
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => TransportError::Timeout,
                other => TransportError::Unreachable(other.to_string()),
            })?;
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::Unreachable(e.to_string()))?;
        serde_json::from_str(&body).map_err(|e| TransportError::Malformed(e.to_string()))
    }
}

fn seat_name(seat: Seat) -> &'static str {
    match seat {
        Seat::A => "a",
        Seat::B => "b",
    }
}

fn private_json(obs: &Observation<'_>) -> Value {
    let mut m = Map::new();
    m.insert("seat".into(), json!(seat_name(obs.seat)));
    match &obs.private {
        PrivateState::None => {}
        PrivateState::Value { value } => {
            m.insert("value".into(), json!(value));
        }
        PrivateState::AuctionValue { value } => {
            m.insert("value".into(), json!(value));
        }
        PrivateState::Target { target } => {
            m.insert("target".into(), json!(target));
        }
    }
    Value::Object(m)
}

fn legal_json(obs: &Observation<'_>) -> Value {
    match (obs.kind, &obs.private, obs.context) {
        (GameKind::StrategicClaim, PrivateState::Value { value }, _) => json!({
            "claim": [value, MAX_VALUE],
            "threshold": [1, NEVER_CHALLENGE],
        }),
        (GameKind::RepeatedPD, _, _) => json!({ "move": ["C", "D"] }),
        (GameKind::SayTheSameThing, _, Context::Stst { previous }) => {
            let vocab = Vocabulary::standard();
            json!({
                "word": vocab.words(),
                "previous_words": [vocab.word(previous[0]), vocab.word(previous[1])],
            })
        }
        (GameKind::TextDixit, _, Context::DixitStory { round }) => json!({
            "clue": round.word_bank,
            "clue_length": [dixit::MIN_CLUE, dixit::MAX_CLUE],
            "predicted_confidence": [0.0, 100.0],
            "scenes": round.scenes.iter().map(|s| &s.text).collect::<Vec<_>>(),
        }),
        (GameKind::TextDixit, _, Context::DixitGuess { scenes, clue }) => json!({
            "guess": [1, dixit::SCENES_PER_ROUND],
            "confidence": [0.0, 100.0],
            "scenes": scenes.iter().map(|s| &s.text).collect::<Vec<_>>(),
            "clue": clue,
        }),
        (GameKind::Auction, PrivateState::AuctionValue { value }, _) => json!({ "bid": [0.0, value] }),
        _ => json!({}),
    }
}

/// Request body for one decision.
pub fn envelope(obs: &Observation<'_>) -> Value {
    let own = obs.scores[obs.seat.index()];
    let opp = obs.scores[obs.seat.other().index()];
    json!({
        "game_kind": obs.kind.short(),
        "role": obs.role,
        "round": obs.round,
        "private_state": private_json(obs),
        "legal_actions": legal_json(obs),
        "history": obs.history,
        "scores": { "own": own, "opponent": opp },
    })
}

fn field<'v>(reply: &'v Value, name: &str) -> Result<&'v Value, String> {
    reply.get(name).ok_or_else(|| format!("missing field `{name}`"))
}

fn int_field(reply: &Value, name: &str) -> Result<i64, String> {
    let v = field(reply, name)?;
    v.as_i64()
        .or_else(|| v.as_f64().filter(|x| x.fract() == 0.0).map(|x| x as i64))
        .ok_or_else(|| format!("`{name}` must be an integer"))
}

fn num_field(reply: &Value, name: &str) -> Result<f64, String> {
    field(reply, name)?
        .as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("`{name}` must be a number"))
}

fn in_range(name: &str, x: f64, lo: f64, hi: f64) -> Result<f64, String> {
    if (lo..=hi).contains(&x) {
        Ok(x)
    } else {
        Err(format!("`{name}` = {x} outside [{lo}, {hi}]"))
    }
}

fn story_round<'a>(obs: &Observation<'a>) -> Option<&'a DixitRound> {
    match obs.context {
        Context::DixitStory { round } => Some(round),
        _ => None,
    }
}

/// Parses a reply and checks it is legal for the observation.
pub fn parse_reply(obs: &Observation<'_>, reply: &Value) -> Result<Action, String> {
    if !reply.is_object() {
        return Err("reply must be a JSON object".into());
    }
    match (obs.kind, &obs.private) {
        (GameKind::StrategicClaim, PrivateState::Value { value }) => {
            let claim = int_field(reply, "claim")?;
            let threshold = int_field(reply, "threshold")?;
            if claim < i64::from(*value) {
                return Err(format!("claim {claim} below private value {value}"));
            }
            if claim > i64::from(MAX_VALUE) {
                return Err(format!("claim {claim} above {MAX_VALUE}"));
            }
            if !(1..=i64::from(NEVER_CHALLENGE)).contains(&threshold) {
                return Err(format!("threshold {threshold} outside 1..={NEVER_CHALLENGE}"));
            }
            Ok(Action::Claim {
                claim: claim as u8,
                threshold: threshold as u8,
            })
        }
        (GameKind::RepeatedPD, _) => {
            let mv = match field(reply, "move")?.as_str() {
                Some("C") | Some("c") => Move::C,
                Some("D") | Some("d") => Move::D,
                _ => return Err("`move` must be \"C\" or \"D\"".into()),
            };
            let message = reply.get("message").and_then(Value::as_str).unwrap_or("").to_string();
            Ok(Action::Move { mv, message })
        }
        (GameKind::SayTheSameThing, _) => {
            let word = field(reply, "word")?.as_str().ok_or("`word` must be a string")?;
            let vocab = Vocabulary::standard();
            Ok(Action::Word {
                word: vocab.word(vocab.resolve(word)).to_string(),
            })
        }
        (GameKind::TextDixit, _) if obs.role == Role::Storyteller => {
            let round = story_round(obs).ok_or("storyteller observation without scenes")?;
            let clue: Vec<String> = field(reply, "clue")?
                .as_array()
                .ok_or("`clue` must be an array")?
                .iter()
                .map(|t| t.as_str().map(str::to_string).ok_or("clue tokens must be strings"))
                .collect::<Result<_, _>>()?;
            if !(dixit::MIN_CLUE..=dixit::MAX_CLUE).contains(&clue.len()) {
                return Err(format!(
                    "clue must have {}-{} tokens, got {}",
                    dixit::MIN_CLUE,
                    dixit::MAX_CLUE,
                    clue.len()
                ));
            }
            if let Some(t) = clue.iter().find(|t| !round.word_bank.contains(t)) {
                return Err(format!("clue token `{t}` not in the word bank"));
            }
            let p = in_range("predicted_confidence", num_field(reply, "predicted_confidence")?, 0.0, 100.0)?;
            Ok(Action::Story {
                clue,
                predicted_confidence: p,
            })
        }
        (GameKind::TextDixit, _) => {
            let guess = int_field(reply, "guess")?;
            if !(1..=dixit::SCENES_PER_ROUND as i64).contains(&guess) {
                return Err(format!("guess {guess} outside 1..={}", dixit::SCENES_PER_ROUND));
            }
            let confidence = in_range("confidence", num_field(reply, "confidence")?, 0.0, 100.0)?;
            Ok(Action::Guess {
                guess: guess as u8,
                confidence,
            })
        }
        (GameKind::Auction, PrivateState::AuctionValue { value }) => {
            let bid = in_range("bid", num_field(reply, "bid")?, 0.0, *value)?;
            Ok(Action::Bid { bid })
        }
        _ => Err("observation does not match the game kind".into()),
    }
}

/// Default action once the retry budget is spent on illegal replies.
pub fn fallback_action(obs: &Observation<'_>) -> Action {
    match (obs.kind, &obs.private, obs.context) {
        (GameKind::StrategicClaim, PrivateState::Value { value }, _) => Action::Claim {
            claim: *value,
            threshold: NEVER_CHALLENGE,
        },
        (GameKind::SayTheSameThing, _, Context::Stst { previous }) => Action::Word {
            word: Vocabulary::standard().word(previous[obs.seat.index()]).to_string(),
        },
        (GameKind::TextDixit, _, Context::DixitStory { round }) => Action::Story {
            clue: round.word_bank[..dixit::MIN_CLUE].to_vec(),
            predicted_confidence: FALLBACK_CONFIDENCE,
        },
        (GameKind::TextDixit, _, _) => Action::Guess {
            guess: 1,
            confidence: FALLBACK_CONFIDENCE,
        },
        (GameKind::Auction, _, _) => Action::Bid { bid: 0.0 },
        _ => Action::Move {
            mv: Move::D,
            message: String::new(),
        },
    }
}

/// Queries the endpoint, making at most `1 + retries` attempts.
pub fn external_decide(
    endpoint: &str,
    timeout: Duration,
    retries: u32,
    obs: &Observation<'_>,
    transport: &dyn Transport,
) -> Decision {
    let base = envelope(obs);
    let mut note: Option<String> = None;
    let mut last_transport_error: Option<TransportError> = None;
    for _ in 0..=retries {
        let mut env = base.clone();
        if let Some(n) = &note {
            env["error_note"] = json!(n);
        }
        match transport.exchange(endpoint, &env, timeout) {
            Ok(reply) => {
                last_transport_error = None;
                match parse_reply(obs, &reply) {
                    Ok(action) => return Decision::Act(action),
                    Err(e) => note = Some(format!("illegal action: {e}")),
                }
            }
            Err(TransportError::Malformed(m)) => {
                last_transport_error = None;
                note = Some(format!("reply was not a JSON object: {m}"));
            }
            Err(e) => last_transport_error = Some(e),
        }
    }
    match last_transport_error {
        Some(e) => Decision::Forfeit(format!("{endpoint}: {e}")),
        None => Decision::Act(fallback_action(obs)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    struct Scripted {
        replies: Mutex<Vec<Result<Value, TransportError>>>,
        seen: Mutex<Vec<Value>>,
    }

    impl Scripted {
        fn new(mut replies: Vec<Result<Value, TransportError>>) -> Self {
            replies.reverse();
            Scripted {
                replies: Mutex::new(replies),
                seen: Mutex::new(Vec::new()),
            }
        }
    }

    impl Transport for Scripted {
        fn exchange(&self, _: &str, envelope: &Value, _: Duration) -> Result<Value, TransportError> {
            self.seen.lock().unwrap().push(envelope.clone());
            self.replies
                .lock()
                .unwrap()
                .pop()
                .unwrap_or(Err(TransportError::Unreachable("script exhausted".into())))
        }
    }

    fn sc_obs(value: u8) -> Observation<'static> {
        Observation {
            kind: GameKind::StrategicClaim,
            seat: Seat::B,
            role: Role::Player,
            round: 1,
            private: PrivateState::Value { value },
            history: &[],
            scores: [1.0, 2.0],
            context: Context::None,
        }
    }

    const T: Duration = Duration::from_millis(100);

    #[test]
    fn envelope_keys() {
        let env = envelope(&sc_obs(2));
        let mut keys: Vec<_> = env.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["game_kind", "history", "legal_actions", "private_state", "role", "round", "scores"]
        );
        assert_eq!(env["game_kind"], "sc");
        assert_eq!(env["private_state"]["seat"], "b");
        assert_eq!(env["scores"]["own"], 2.0);
    }

    #[test]
    fn legal_claim_accepted() {
        let t = Scripted::new(vec![Ok(json!({"claim": 2, "threshold": 5}))]);
        let d = external_decide("x", T, 2, &sc_obs(2), &t);
        assert_eq!(d, Decision::Act(Action::Claim { claim: 2, threshold: 5 }));
    }

    #[test]
    fn illegal_claim_retried_then_falls_back() {
        let t = Scripted::new(vec![
            Ok(json!({"claim": 1, "threshold": 5})),
            Ok(json!({"claim": 1, "threshold": 5})),
        ]);
        let d = external_decide("x", T, 1, &sc_obs(3), &t);
        assert_eq!(d, Decision::Act(Action::Claim { claim: 3, threshold: 7 }));
        let seen = t.seen.lock().unwrap();
        assert_eq!(seen.len(), 2);
        assert!(seen[0].get("error_note").is_none());
        assert!(seen[1]["error_note"].as_str().unwrap().contains("below private value"));
    }

    #[test]
    fn retry_can_recover() {
        let t = Scripted::new(vec![Ok(json!({"claim": 9})), Ok(json!({"claim": 6, "threshold": 7}))]);
        let d = external_decide("x", T, 1, &sc_obs(3), &t);
        assert_eq!(d, Decision::Act(Action::Claim { claim: 6, threshold: 7 }));
    }

    #[test]
    fn transport_failure_forfeits() {
        let t = Scripted::new(vec![Err(TransportError::Timeout), Err(TransportError::Timeout)]);
        assert!(matches!(external_decide("x", T, 1, &sc_obs(3), &t), Decision::Forfeit(_)));
    }

    #[test]
    fn rpd_reply_and_fallback() {
        let obs = Observation {
            kind: GameKind::RepeatedPD,
            private: PrivateState::None,
            ..sc_obs(1)
        };
        assert_eq!(
            parse_reply(&obs, &json!({"move": "C", "message": "hi"})),
            Ok(Action::Move { mv: Move::C, message: "hi".into() })
        );
        assert!(parse_reply(&obs, &json!({"move": "X"})).is_err());
        assert_eq!(fallback_action(&obs), Action::Move { mv: Move::D, message: String::new() });
    }

    #[test]
    fn stst_out_of_vocabulary_maps_to_a_token() {
        let obs = Observation {
            kind: GameKind::SayTheSameThing,
            private: PrivateState::None,
            context: Context::Stst { previous: [0, 1] },
            ..sc_obs(1)
        };
        let vocab = Vocabulary::standard();
        match parse_reply(&obs, &json!({"word": "zzqx-not-a-word"})).unwrap() {
            Action::Word { word } => assert!(vocab.index_of(&word).is_some()),
            a => panic!("{a:?}"),
        }
        assert_eq!(fallback_action(&obs), Action::Word { word: vocab.word(1).to_string() });
    }

    #[test]
    fn http_unreachable_forfeits() {
        let d = external_decide("http://127.0.0.1:1/", Duration::from_millis(500), 1, &sc_obs(3), &HttpTransport);
        assert!(matches!(d, Decision::Forfeit(_)));
    }
}
