use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The five games played by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GameKind {
    StrategicClaim,
    RepeatedPD,
    SayTheSameThing,
    TextDixit,
    Auction,
}

/// Reasoning axis measured by a game. `Control` is the auction baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    RSR,
    RSM,
    SCG,
    ESM,
    Control,
}

impl GameKind {
    pub const ALL: [GameKind; 5] = [
        GameKind::StrategicClaim,
        GameKind::RepeatedPD,
        GameKind::SayTheSameThing,
        GameKind::TextDixit,
        GameKind::Auction,
    ];

    pub fn axis(self) -> Axis {
        match self {
            GameKind::StrategicClaim => Axis::RSR,
            GameKind::RepeatedPD => Axis::RSM,
            GameKind::SayTheSameThing => Axis::SCG,
            GameKind::TextDixit => Axis::ESM,
            GameKind::Auction => Axis::Control,
        }
    }

    /// Short name used in file names and on the command line.
    pub fn short(self) -> &'static str {
        match self {
            GameKind::StrategicClaim => "sc",
            GameKind::RepeatedPD => "rpd",
            GameKind::SayTheSameThing => "stst",
            GameKind::TextDixit => "dixit",
            GameKind::Auction => "auction",
        }
    }

    fn tag(self) -> u64 {
        match self {
            GameKind::StrategicClaim => 1,
            GameKind::RepeatedPD => 2,
            GameKind::SayTheSameThing => 3,
            GameKind::TextDixit => 4,
            GameKind::Auction => 5,
        }
    }

    pub(crate) fn seed_tag(self) -> u64 {
        self.tag()
    }
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::RSR, Axis::RSM, Axis::SCG, Axis::ESM, Axis::Control];

    pub fn game_kind(self) -> GameKind {
        match self {
            Axis::RSR => GameKind::StrategicClaim,
            Axis::RSM => GameKind::RepeatedPD,
            Axis::SCG => GameKind::SayTheSameThing,
            Axis::ESM => GameKind::TextDixit,
            Axis::Control => GameKind::Auction,
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::RSR => "RSR",
            Axis::RSM => "RSM",
            Axis::SCG => "SCG",
            Axis::ESM => "ESM",
            Axis::Control => "Control",
        };
        f.write_str(s)
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "sc" | "strategicclaim" | "strategic_claim" => Ok(GameKind::StrategicClaim),
            "rpd" | "repeatedpd" | "repeated_pd" => Ok(GameKind::RepeatedPD),
            "stst" | "saythesamething" | "say_the_same_thing" => Ok(GameKind::SayTheSameThing),
            "dixit" | "textdixit" | "text_dixit" => Ok(GameKind::TextDixit),
            "auction" => Ok(GameKind::Auction),
            other => Err(Error::invalid(format!("unknown game kind `{other}`"))),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "RSR" => Ok(Axis::RSR),
            "RSM" => Ok(Axis::RSM),
            "SCG" => Ok(Axis::SCG),
            "ESM" => Ok(Axis::ESM),
            "CONTROL" => Ok(Axis::Control),
            other => Err(Error::invalid(format!("unknown axis `{other}`"))),
        }
    }
}

/// Identifier of an agent (a model, a synthetic policy, an endpoint).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Self {
        AgentId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        AgentId(s.to_string())
    }
}

/// Seat of a player in a two-player game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seat {
    A,
    B,
}

impl Seat {
    pub fn index(self) -> usize {
        match self {
            Seat::A => 0,
            Seat::B => 1,
        }
    }

    pub fn other(self) -> Seat {
        match self {
            Seat::A => Seat::B,
            Seat::B => Seat::A,
        }
    }

    pub fn from_index(i: usize) -> Seat {
        if i == 0 {
            Seat::A
        } else {
            Seat::B
        }
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Seat::A => "a",
            Seat::B => "b",
        })
    }
}
