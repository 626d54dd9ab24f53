//! JSON Lines game logs: one `GameRecord` per line, UTF-8.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::record::GameRecord;

fn check(record: &GameRecord, line: usize) -> Result<()> {
    record.validate().map_err(|v| Error::Validation {
        line,
        round: v.round,
        message: v.message,
    })
}

/// Writes `records` to `path`, replacing any existing file.
pub fn write_log(records: &[GameRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_records(records, file)
}

/// Appends `records` to `path`, creating it if needed.
pub fn append_log(records: &[GameRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    write_records(records, file)
}

fn write_records(records: &[GameRecord], file: File) -> Result<()> {
    let mut w = BufWriter::new(file);
    for (i, r) in records.iter().enumerate() {
        check(r, i + 1)?;
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads and validates every record in `path`. Blank lines are skipped.
pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<GameRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: GameRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        check(&record, line_no)?;
        out.push(record);
    }
    Ok(out)
}
