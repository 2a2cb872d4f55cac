use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::{parse_case, serialize, ParseDiagnostic};
use crate::model::{Case, Timestamp};

/// Hash named in every snapshot header.
pub const DIGEST_ALGORITHM: &str = "sha256";

const MAGIC: &str = "eac-snapshot";

/// A snapshot label: a non-empty run of non-whitespace characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SnapshotLabel(String);

impl SnapshotLabel {
    pub fn new(s: impl Into<String>) -> Result<Self, SnapshotError> {
        let s = s.into();
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(SnapshotError::InvalidLabel(s));
        }
        Ok(SnapshotLabel(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SnapshotLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SnapshotError {
    #[error("invalid snapshot label {0:?}: must be non-empty without whitespace")]
    InvalidLabel(String),
    #[error("malformed snapshot header: {0}")]
    MalformedHeader(String),
    #[error("unsupported digest algorithm `{0}`")]
    UnsupportedAlgorithm(String),
    #[error("digest mismatch: header says {expected}, content hashes to {actual}")]
    DigestMismatch { expected: String, actual: String },
    #[error("frozen case text does not parse ({} diagnostic(s))", .0.len())]
    Frozen(Vec<ParseDiagnostic>),
}

/// A frozen, hashed copy of a case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub label: SnapshotLabel,
    pub taken_at: Timestamp,
    /// Canonical `.eac` text.
    pub frozen: String,
    /// Lowercase hex digest of `frozen`.
    pub digest: String,
}

fn digest_of(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn snapshot(case: &Case, label: SnapshotLabel) -> Snapshot {
    snapshot_at(case, label, Timestamp::now())
}

pub fn snapshot_at(case: &Case, label: SnapshotLabel, taken_at: Timestamp) -> Snapshot {
    let frozen = serialize(case);
    let digest = digest_of(&frozen);
    Snapshot { label, taken_at, frozen, digest }
}

impl Snapshot {
    pub fn header(&self) -> String {
        format!("{MAGIC} {} {} {DIGEST_ALGORITHM}:{}", self.label, self.taken_at, self.digest)
    }

    /// File form: header line followed by the frozen text.
    pub fn to_file(&self) -> String {
        format!("{}\n{}", self.header(), self.frozen)
    }

    /// Reads a snapshot file, checking the digest and that the frozen text parses.
    pub fn parse(text: &str) -> Result<Snapshot, SnapshotError> {
        let (header, frozen) = text
            .split_once('\n')
            .ok_or_else(|| SnapshotError::MalformedHeader("missing header line".into()))?;
        let parts: Vec<&str> = header.split(' ').collect();
        let [magic, label, taken_at, digest] = parts[..] else {
            return Err(SnapshotError::MalformedHeader(format!("expected 4 fields, found {}", parts.len())));
        };
        if magic != MAGIC {
            return Err(SnapshotError::MalformedHeader(format!("expected `{MAGIC}`")));
        }
        let label = SnapshotLabel::new(label)?;
        let taken_at = Timestamp::parse(taken_at)
            .ok_or_else(|| SnapshotError::MalformedHeader(format!("bad timestamp {taken_at:?}")))?;
        let (algo, hex_digest) = digest
            .split_once(':')
            .ok_or_else(|| SnapshotError::MalformedHeader("digest must be <algorithm>:<hex>".into()))?;
        if algo != DIGEST_ALGORITHM {
            return Err(SnapshotError::UnsupportedAlgorithm(algo.to_string()));
        }
        let actual = digest_of(frozen);
        if hex_digest != actual {
            return Err(SnapshotError::DigestMismatch { expected: hex_digest.to_string(), actual });
        }
        parse_case(frozen).map_err(SnapshotError::Frozen)?;
        Ok(Snapshot { label, taken_at, frozen: frozen.to_string(), digest: actual })
    }

    pub fn case(&self) -> Result<Case, Vec<ParseDiagnostic>> {
        parse_case(&self.frozen)
    }

    pub fn verify(&self) -> bool {
        digest_of(&self.frozen) == self.digest
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id;
    use crate::model::{Element, Phase};

    fn label(s: &str) -> SnapshotLabel {
        SnapshotLabel::new(s).unwrap()
    }

    #[test]
    fn file_round_trip() {
        let c = Case::new(id!("c"), "Title", Phase::Interim)
            .unwrap()
            .add_element(Element::warrant(id!("W"), "w"))
            .unwrap();
        let s = snapshot_at(&c, label("v1"), Timestamp::from_unix(1_700_000_000).unwrap());
        assert_eq!(s.digest.len(), 64);
        let back = Snapshot::parse(&s.to_file()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.case().unwrap(), c);
        assert!(s.header().starts_with("eac-snapshot v1 2023-11-14T22:13:20Z sha256:"));
    }

    #[test]
    fn tampering_is_detected() {
        let c = Case::new(id!("c"), "Title", Phase::Interim).unwrap();
        let file = snapshot_at(&c, label("v1"), Timestamp::from_unix(0).unwrap()).to_file();
        let tampered = file.replace("Title", "Other");
        assert!(matches!(Snapshot::parse(&tampered), Err(SnapshotError::DigestMismatch { .. })));
        assert!(matches!(Snapshot::parse("nonsense"), Err(SnapshotError::MalformedHeader(_))));
        assert!(SnapshotLabel::new("two words").is_err());
    }
}
