use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Caller-supplied identifier for elements, links and challenges.
///
/// Identifiers match `[A-Za-z][A-Za-z0-9_-]*` so they can be written bare in
/// the case language and stay readable in diffs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Id(String);

pub type ElementId = Id;
pub type LinkId = Id;
pub type ChallengeId = Id;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier {0:?}: expected a letter followed by letters, digits, '_' or '-'")]
pub struct InvalidId(pub String);

impl Id {
    pub fn new(s: impl Into<String>) -> Result<Self, InvalidId> {
        let s = s.into();
        if is_valid_id(&s) {
            Ok(Id(s))
        } else {
            Err(InvalidId(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Prepends `prefix`; fails if the result is not a valid identifier.
    pub fn prefixed(&self, prefix: &str) -> Result<Self, InvalidId> {
        Id::new(format!("{prefix}{}", self.0))
    }
}

pub fn is_valid_id(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FromStr for Id {
    type Err = InvalidId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Id::new(s)
    }
}

impl Borrow<str> for Id {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Id {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Id {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Id {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Id::new(s).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and fixtures; panics on an invalid literal.
#[macro_export]
macro_rules! id {
    ($s:expr) => {
        $crate::Id::new($s).expect("valid identifier literal")
    };
}
