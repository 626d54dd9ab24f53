//! Tournament configuration, read from TOML.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tomgame_core::conditions::DEFAULT_CONDITION_COUNT;
use tomgame_core::{AgentSpec, Error, GameKind, Result};

pub const DEFAULT_REPLICATIONS: usize = 10;

fn default_conditions() -> usize {
    DEFAULT_CONDITION_COUNT
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_true() -> bool {
    true
}

fn default_output() -> PathBuf {
    PathBuf::from("tournament-out")
}

/// ```toml
/// master_seed = 42
/// game_kinds = ["sc", "rpd"]
/// replications = 10
/// output_dir = "out"
///
/// [replications_per_kind]
/// sc = 18
///
/// [[agents]]
/// id = "nash"
/// kind = "nash"
///
/// [[agents]]
/// id = "q1"
/// kind = "qre"
/// lambda = 1.0
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentConfig {
    pub agents: Vec<AgentSpec>,
    /// Short names: sc, rpd, stst, dixit, auction.
    pub game_kinds: Vec<String>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Overrides of `replications` keyed by short game name.
    #[serde(default)]
    pub replications_per_kind: BTreeMap<String, usize>,
    pub master_seed: u64,
    #[serde(default = "default_conditions")]
    pub condition_count: usize,
    #[serde(default = "default_true")]
    pub include_self_play: bool,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl TournamentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: TournamentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config file; a relative `output_dir` resolves against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.output_dir.is_relative() {
            if let Some(parent) = path.parent() {
                cfg.output_dir = parent.join(&cfg.output_dir);
            }
        }
        Ok(cfg)
    }

    pub fn kinds(&self) -> Result<Vec<GameKind>> {
        let mut out = Vec::new();
        for k in &self.game_kinds {
            let kind: GameKind = k.parse()?;
            if out.contains(&kind) {
                return Err(Error::InvalidInput(format!("game kind `{k}` listed twice")));
            }
            out.push(kind);
        }
        Ok(out)
    }

    pub fn replications_for(&self, kind: GameKind) -> usize {
        self.replications_per_kind
            .iter()
            .find(|(k, _)| k.parse::<GameKind>().ok() == Some(kind))
            .map_or(self.replications, |(_, &n)| n)
    }

    /// Unordered agent pairs `(i, j)` with `i <= j`, self-pairs when enabled.
    pub fn pairings(&self) -> Vec<(usize, usize)> {
        let n = self.agents.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                if i != j || self.include_self_play {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(format!("config: {m}")));
        if self.agents.is_empty() {
            return bad("no agents".into());
        }
        let mut ids = BTreeSet::new();
        for a in &self.agents {
            a.validate()?;
            if !ids.insert(a.id.clone()) {
                return bad(format!("duplicate agent id `{}`", a.id));
            }
        }
        let kinds = self.kinds()?;
        if kinds.is_empty() {
            return bad("no game kinds".into());
        }
        for k in self.replications_per_kind.keys() {
            let kind: GameKind = k.parse()?;
            if !kinds.contains(&kind) {
                return bad(format!("replications given for unplayed kind `{k}`"));
            }
        }
        if kinds.iter().any(|&k| self.replications_for(k) == 0) {
            return bad("replications must be >= 1".into());
        }
        if self.condition_count == 0 {
            return bad("condition_count must be >= 1".into());
        }
        if self.pairings().is_empty() {
            return bad("no pairings: a single agent needs include_self_play = true".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
master_seed = 7
game_kinds = ["sc"]
[[agents]]
id = "a"
kind = "nash"
[[agents]]
id = "b"
kind = "random"
"#;

    #[test]
    fn defaults_apply() {
        let c = TournamentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.replications, 10);
        assert_eq!(c.condition_count, 150);
        assert!(c.include_self_play);
        assert_eq!(c.pairings(), vec![(0, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn seven_agents_give_28_pairings() {
        let mut c = TournamentConfig::from_toml(BASE).unwrap();
        c.agents = (0..7).map(|i| AgentSpec::new(format!("m{i}"), tomgame_core::AgentKind::Nash)).collect();
        assert_eq!(c.pairings().len(), 28);
        c.include_self_play = false;
        assert_eq!(c.pairings().len(), 21);
    }

    #[test]
    fn rejects_bad_configs() {
        let dup = BASE.replace("id = \"b\"", "id = \"a\"");
        assert!(TournamentConfig::from_toml(&dup).is_err());
        assert!(TournamentConfig::from_toml(&BASE.replace("[\"sc\"]", "[\"chess\"]")).is_err());
        assert!(TournamentConfig::from_toml(&format!("replications = 0\n{BASE}")).is_err());
        assert!(TournamentConfig::from_toml(&format!("bogus = 1\n{BASE}")).is_err());
        assert!(TournamentConfig::from_toml(&BASE.replace("kind = \"nash\"", "kind = \"qre\"\nlambda = -1.0")).is_err());
    }

    #[test]
    fn per_kind_replications() {
        let c = TournamentConfig::from_toml(&format!("{BASE}\n[replications_per_kind]\nsc = 18\n")).unwrap();
        assert_eq!(c.replications_for(GameKind::StrategicClaim), 18);
        assert!(TournamentConfig::from_toml(&format!("{BASE}\n[replications_per_kind]\nrpd = 3\n")).is_err());
    }
}
