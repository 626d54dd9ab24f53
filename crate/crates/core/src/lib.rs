//! Simulation and estimation engine for strategic-reasoning games.
//!
//! Four games probe distinct reasoning axes (Strategic Claim, Repeated PD with
//! cheap talk, Say the Same Thing, Text-Dixit) and a sealed-bid auction serves
//! as a non-social control. Synthetic agents with known rationality act as
//! ground truth for the estimators: logit-QRE rationality (MLE and grid
//! Bayes), per-axis ELO with bootstrap intervals, and round-block convergence
//! analytics.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod analytics;
pub mod conditions;
pub mod equilibrium;
pub mod error;
pub mod estimation;
pub mod games;
pub mod log;
pub mod record;
pub mod rating;
pub mod rng;
pub mod stats;
pub mod types;

pub use agents::{AgentKind, AgentSpec};
pub use conditions::{sample_conditions, ConditionPayload, ConditionSet};
pub use error::{Error, Result};
pub use games::{run_game, GameEngine};
pub use log::{read_log, write_log};
pub use record::{Action, GameRecord, Outcome, PrivateState, RoundRecord};
pub use rng::{derive_seed, GameRng};
pub use types::{AgentId, Axis, GameKind, Seat};
