//! Decision policies.
//!
//! Synthetic agents have known rationality and serve as ground truth for the
//! estimators. External agents forward each decision to an HTTP endpoint.
//! Every policy is a function of the observation (which carries the full
//! game history), so agents hold no hidden state between rounds.

pub mod beliefs;
pub mod external;
pub mod synthetic;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::dixit::{DixitRound, Scene};
use crate::record::{Action, PrivateState, RoundRecord};
use crate::rng::GameRng;
use crate::types::{AgentId, GameKind, Seat};

pub use beliefs::BeliefState;
pub use external::{HttpTransport, Transport, TransportError};
pub use synthetic::{smoothing_bluff_prob, smoothing_decide, smoothing_update};

/// Default half-width of the region where smoothing agents respond to beliefs.
/// It covers all of `[0, 1]` around the equilibrium rate.
pub const SMOOTHING_BAND: f64 = 1.0;

fn default_band() -> f64 {
    SMOOTHING_BAND
}

fn default_timeout_ms() -> u64 {
    30_000
}

fn default_retries() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentKind {
    /// Logit response with rationality `lambda` against beliefs from history.
    Qre { lambda: f64 },
    /// Equilibrium play (the approximate SC profile, defection in RPD, ...).
    Nash,
    /// Uniform play; in SC a fair coin between bluffing and honesty.
    Random,
    /// Exponential-smoothing belief learner for SC.
    Smoothing {
        eta: f64,
        kappa: f64,
        initial: f64,
        #[serde(default = "default_band")]
        band: f64,
    },
    /// Remote decision service.
    External {
        endpoint: String,
        #[serde(default = "default_timeout_ms")]
        timeout_ms: u64,
        #[serde(default = "default_retries")]
        retries: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: AgentId,
    #[serde(flatten)]
    pub kind: AgentKind,
}

impl AgentSpec {
    pub fn new(id: impl Into<String>, kind: AgentKind) -> Self {
        AgentSpec {
            id: AgentId::new(id),
            kind,
        }
    }

    pub fn smoothing(id: impl Into<String>, eta: f64, kappa: f64, initial: f64) -> Self {
        AgentSpec::new(
            id,
            AgentKind::Smoothing {
                eta,
                kappa,
                initial,
                band: SMOOTHING_BAND,
            },
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(format!("agent `{}`: {m}", self.id)));
        if self.id.as_str().is_empty() {
            return bad("empty id");
        }
        match &self.kind {
            AgentKind::Qre { lambda } if !(*lambda >= 0.0 && lambda.is_finite()) => bad("lambda must be >= 0"),
            AgentKind::Smoothing { eta, kappa, initial, band } => {
                if !(*eta > 0.0 && *eta < 1.0) {
                    bad("eta must lie in (0, 1)")
                } else if !(0.0..1.0).contains(kappa) {
                    bad("kappa must lie in [0, 1)")
                } else if !(0.0..=1.0).contains(initial) {
                    bad("initial belief must lie in [0, 1]")
                } else if !(*band > 0.0) {
                    bad("band must be > 0")
                } else {
                    Ok(())
                }
            }
            AgentKind::External { endpoint, timeout_ms, .. } => {
                if endpoint.is_empty() {
                    bad("empty endpoint")
                } else if *timeout_ms == 0 {
                    bad("timeout must be > 0")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn timeout(&self) -> Option<Duration> {
        match self.kind {
            AgentKind::External { timeout_ms, .. } => Some(Duration::from_millis(timeout_ms)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Player,
    Storyteller,
    Guesser,
}

/// Game-specific public context beyond the history.
#[derive(Clone, Copy, Debug)]
pub enum Context<'a> {
    None,
    /// Vocabulary indices of the previous round's words (start words in round 1).
    Stst { previous: [usize; 2] },
    DixitStory { round: &'a DixitRound },
    DixitGuess { scenes: &'a [Scene], clue: &'a [String] },
}

/// Everything a policy may condition on for one decision.
#[derive(Clone, Debug)]
pub struct Observation<'a> {
    pub kind: GameKind,
    pub seat: Seat,
    pub role: Role,
    pub round: u32,
    pub private: PrivateState,
    pub history: &'a [RoundRecord],
    pub scores: [f64; 2],
    pub context: Context<'a>,
}

/// Result of asking an agent for an action.
#[derive(Clone, Debug, PartialEq)]
pub enum Decision {
    Act(Action),
    /// The agent could not produce an action within its retry budget.
    Forfeit(String),
}

/// Dispatches a decision to the agent's policy.
pub fn decide(spec: &AgentSpec, obs: &Observation<'_>, rng: &mut GameRng, transport: &dyn Transport) -> Decision {
    match &spec.kind {
        AgentKind::Qre { lambda } => Decision::Act(synthetic::qre_decide(*lambda, obs, rng)),
        AgentKind::Nash => Decision::Act(synthetic::nash_decide(obs, rng)),
        AgentKind::Random => Decision::Act(synthetic::random_decide(obs, rng)),
        AgentKind::Smoothing { eta, kappa, initial, band } => {
            Decision::Act(synthetic::smoothing_agent_decide(*eta, *kappa, *initial, *band, obs, rng))
        }
        AgentKind::External { endpoint, timeout_ms, retries } => {
            external::external_decide(endpoint, Duration::from_millis(*timeout_ms), *retries, obs, transport)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parses_from_config_text() {
        let s: AgentSpec = serde_json::from_str(r#"{"id":"q","kind":"qre","lambda":0.5}"#).unwrap();
        assert_eq!(s.kind, AgentKind::Qre { lambda: 0.5 });
        let s: AgentSpec =
            serde_json::from_str(r#"{"id":"s","kind":"smoothing","eta":0.4,"kappa":0.52,"initial":0.7}"#).unwrap();
        assert!(matches!(s.kind, AgentKind::Smoothing { band, .. } if band == SMOOTHING_BAND));
        let s: AgentSpec =
            serde_json::from_str(r#"{"id":"x","kind":"external","endpoint":"http://127.0.0.1:1/"}"#).unwrap();
        assert_eq!(s.timeout(), Some(Duration::from_millis(30_000)));
    }

    #[test]
    fn invariants_checked() {
        assert!(AgentSpec::new("q", AgentKind::Qre { lambda: -0.1 }).validate().is_err());
        assert!(AgentSpec::smoothing("s", 0.0, 0.5, 0.5).validate().is_err());
        assert!(AgentSpec::smoothing("s", 0.4, 1.0, 0.5).validate().is_err());
        assert!(AgentSpec::smoothing("s", 0.4, 0.52, 1.2).validate().is_err());
        assert!(AgentSpec::smoothing("s", 0.4, 0.52, 0.7).validate().is_ok());
        assert!(AgentSpec::new("", AgentKind::Nash).validate().is_err());
    }
}
