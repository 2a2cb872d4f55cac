//! Append-only challenge journal, one JSON object per line.

use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use eac_core::model::Outcome;
use eac_core::Id;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const JOURNAL_FILE: &str = "journal.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Op {
    Challenge { id: Id, target: Id, author: String, text: String },
    Resolve { id: Id, outcome: Outcome, note: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub seq: u64,
    pub case: Id,
    #[serde(flatten)]
    pub op: Op,
}

impl Entry {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("entries serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Error)]
pub enum JournalError {
    #[error("journal line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("journal line {line}: sequence {found} after {previous}")]
    OutOfOrder { line: usize, previous: u64, found: u64 },
    #[error("journal: {0}")]
    Io(#[from] io::Error),
}

/// Parses one journal line, without its line feed.
pub fn parse_line(line: &str) -> Result<Entry, String> {
    serde_json::from_str(line).map_err(|e| e.to_string())
}

/// Entries of a journal text. A final line without its line feed that
/// does not parse is a torn write; its byte offset is returned so the
/// caller can cut it off.
pub fn read_entries(text: &str) -> Result<(Vec<Entry>, Option<usize>), JournalError> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut offset = 0;
    for (i, raw) in text.split_inclusive('\n').enumerate() {
        let line = i + 1;
        let complete = raw.ends_with('\n');
        let body = raw.trim_end_matches('\n');
        if body.trim().is_empty() {
            offset += raw.len();
            continue;
        }
        let entry = match parse_line(body) {
            Ok(e) => e,
            Err(_) if !complete => return Ok((entries, Some(offset))),
            Err(message) => return Err(JournalError::Corrupt { line, message }),
        };
        let previous = entries.last().map_or(0, |e| e.seq);
        if entry.seq <= previous {
            return Err(JournalError::OutOfOrder { line, previous, found: entry.seq });
        }
        entries.push(entry);
        offset += raw.len();
    }
    Ok((entries, None))
}

pub struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    /// Opens or creates the journal in `dir` and returns its entries.
    pub fn open(dir: &Path) -> Result<(Journal, Vec<Entry>), JournalError> {
        let path = dir.join(JOURNAL_FILE);
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(&path)?;
        let mut text = String::new();
        file.read_to_string(&mut text)
            .map_err(|e| JournalError::Corrupt { line: 0, message: e.to_string() })?;
        let (entries, torn) = read_entries(&text)?;
        if let Some(at) = torn {
            log::warn!("{}: dropping torn final line at byte {at}", path.display());
            file.set_len(at as u64)?;
            file.seek(SeekFrom::End(0))?;
        }
        Ok((Journal { path, file }, entries))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes and syncs one entry. On failure the file is cut back to its
    /// previous length.
    pub fn append(&mut self, entry: &Entry) -> io::Result<()> {
        let before = self.file.metadata()?.len();
        let result = self.file.write_all(entry.to_line().as_bytes()).and_then(|_| self.file.sync_data());
        if result.is_err() {
            let _ = self.file.set_len(before);
        }
        result
    }
}
