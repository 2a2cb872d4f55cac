//! The case store: `.eac` files and `.snap` snapshots in one directory,
//! plus the journal of challenge mutations replayed over them.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use eac_core::dsl::{parse_case, ParseDiagnostic};
use eac_core::lifecycle::Snapshot;
use eac_core::model::{Case, Challenge, ModelError};
use eac_core::Id;
use thiserror::Error;

use crate::journal::{Entry, Journal, JournalError, Op};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{}:{}: {} {}", path.display(), first.span.line, first.span.column, first.code, first.message)]
    Parse { path: PathBuf, first: Box<ParseDiagnostic>, count: usize },
    #[error("{}: {message}", path.display())]
    Snapshot { path: PathBuf, message: String },
    #[error("case `{id}` is defined by both {} and {}", first.display(), second.display())]
    DuplicateCase { id: Id, first: PathBuf, second: PathBuf },
    #[error("snapshot `{label}` of case `{case}` appears twice")]
    DuplicateSnapshot { case: Id, label: String },
    #[error(transparent)]
    Journal(#[from] JournalError),
    #[error("journal entry {seq} does not apply: {message}")]
    Replay { seq: u64, message: String },
}

/// Why a journal entry does not apply to a state.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("unknown case `{0}`")]
    UnknownCase(Id),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One immutable view of every case. Readers hold it through an `Arc`;
/// the writer replaces it whole.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct State {
    /// Sequence number of the last applied journal entry, 0 for none.
    pub seq: u64,
    pub cases: BTreeMap<Id, Case>,
    /// Snapshots by case id, then by label.
    pub snapshots: BTreeMap<Id, BTreeMap<String, Snapshot>>,
}

impl State {
    pub fn apply(&self, entry: &Entry) -> Result<State, ApplyError> {
        let case = self.cases.get(&entry.case).ok_or_else(|| ApplyError::UnknownCase(entry.case.clone()))?;
        let next = match &entry.op {
            Op::Challenge { id, target, author, text } => {
                case.attach_challenge(Challenge::open(id.clone(), target.clone(), author.as_str(), text.as_str()))?
            }
            Op::Resolve { id, outcome, note } => case.resolve_challenge(id.as_str(), *outcome, note)?,
        };
        let mut state = self.clone();
        state.cases.insert(entry.case.clone(), next);
        state.seq = entry.seq;
        Ok(state)
    }

    /// The smallest `K<n>` not yet used as an identifier in `case`.
    pub fn next_challenge_id(case: &Case) -> Id {
        (1..)
            .map(|n| Id::new(format!("K{n}")).expect("valid id"))
            .find(|id| !case.contains_id(id.as_str()))
            .expect("unbounded")
    }
}

fn read(path: &Path) -> Result<String, StoreError> {
    fs::read_to_string(path).map_err(|source| StoreError::Io { path: path.to_path_buf(), source })
}

/// Reads every case and snapshot in `dir` (sorted by file name).
pub fn load_files(dir: &Path) -> Result<State, StoreError> {
    let io_err = |source| StoreError::Io { path: dir.to_path_buf(), source };
    let mut paths: Vec<PathBuf> =
        fs::read_dir(dir).map_err(io_err)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(io_err)?;
    paths.sort();
    let mut state = State::default();
    let mut origin: BTreeMap<Id, PathBuf> = BTreeMap::new();
    for path in paths {
        match path.extension().and_then(|e| e.to_str()) {
            Some("eac") => {
                let case = parse_case(&read(&path)?).map_err(|diags| StoreError::Parse {
                    path: path.clone(),
                    count: diags.len(),
                    first: Box::new(diags[0].clone()),
                })?;
                if let Some(first) = origin.get(case.id()) {
                    return Err(StoreError::DuplicateCase { id: case.id().clone(), first: first.clone(), second: path });
                }
                origin.insert(case.id().clone(), path);
                state.cases.insert(case.id().clone(), case);
            }
            Some("snap") => {
                let snap = Snapshot::parse(&read(&path)?)
                    .map_err(|e| StoreError::Snapshot { path: path.clone(), message: e.to_string() })?;
                let case = snap.case().map_err(|d| StoreError::Snapshot {
                    path: path.clone(),
                    message: format!("frozen case does not parse: {}", d[0].message),
                })?;
                let label = snap.label.to_string();
                let by_label = state.snapshots.entry(case.id().clone()).or_default();
                if by_label.contains_key(&label) {
                    return Err(StoreError::DuplicateSnapshot { case: case.id().clone(), label });
                }
                by_label.insert(label, snap);
            }
            _ => {}
        }
    }
    Ok(state)
}

/// Loads the store in `dir` and replays its journal.
pub fn open(dir: &Path) -> Result<(State, Journal), StoreError> {
    let mut state = load_files(dir)?;
    let (journal, entries) = Journal::open(dir)?;
    for entry in &entries {
        state = state.apply(entry).map_err(|e| StoreError::Replay { seq: entry.seq, message: e.to_string() })?;
    }
    Ok((state, journal))
}
