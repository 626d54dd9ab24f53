//! Tournament scheduling, the end-to-end report pipeline and the command
//! line front end.

pub mod bundle;
pub mod config;
pub mod pipeline;
pub mod tournament;

pub use config::TournamentConfig;
pub use pipeline::{pipeline, PipelineOptions, PipelineOutcome};
pub use tournament::{run_tournament, TournamentSummary};

use std::path::{Path, PathBuf};

use tomgame_core::{read_log, Error, GameRecord, Result};

/// Reads one log file, or every `*.jsonl` file in a directory in name order.
pub fn load_logs(path: &Path) -> Result<Vec<GameRecord>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            out.extend(read_log(&f).map_err(|e| Error::InvalidInput(format!("{}: {e}", f.display())))?);
        }
        Ok(out)
    } else {
        read_log(path)
    }
}
