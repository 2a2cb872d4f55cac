//! The case graph: elements, typed links between them, and the stakeholder
//! challenges raised against either.
//!
//! Every [`Case`] operation is a persistent update: it borrows the input and
//! returns a new value, so a case can be shared freely between readers.

mod case;
mod element;

use std::fmt;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::keyword::keyword_enum;

pub use case::{Case, Fragment, ModelError};
pub use element::{goal_from_template, Element, GoalSlots, KindRule, Locator, SlotName, TemplateError};

keyword_enum! {
    /// Node kinds of the argument graph.
    pub enum ElementKind {
        Goal => "Goal",
        Context => "Context",
        PropertyClaim => "PropertyClaim",
        EvidentialClaim => "EvidentialClaim",
        Evidence => "Evidence",
        Warrant => "Warrant",
        Assumption => "Assumption",
    }
}

keyword_enum! {
    pub enum LinkKind {
        Supports => "supports",
        ContextOf => "contextOf",
        Evidences => "evidences",
        Warrants => "warrants",
    }
}

keyword_enum! {
    /// Whether a property claim is about the system itself or the project's conduct.
    pub enum Scope {
        System => "system",
        Project => "project",
    }
}

keyword_enum! {
    /// Audience layers, ordered `public < stakeholder < auditor`.
    #[derive(Default)]
    pub enum AudienceTier {
        #[default]
        Public => "public",
        Stakeholder => "stakeholder",
        Auditor => "auditor",
    }
}

impl AudienceTier {
    /// An element at `self` may be shown to a viewer holding `viewer`.
    pub fn visible_to(self, viewer: AudienceTier) -> bool {
        self <= viewer
    }
}

keyword_enum! {
    /// Maturity phase of a case.
    pub enum Phase {
        Preliminary => "preliminary",
        Interim => "interim",
        Operational => "operational",
    }
}

keyword_enum! {
    /// Ordinal strength marker, strongest first.
    pub enum QualifierLabel {
        Certainly => "certainly",
        VeryLikely => "very-likely",
        Likely => "likely",
        Plausibly => "plausibly",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Qualifier {
    pub label: QualifierLabel,
    pub note: Option<String>,
}

impl Qualifier {
    pub fn new(label: QualifierLabel) -> Self {
        Qualifier { label, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Link {
    pub id: Id,
    pub kind: LinkKind,
    pub from: Id,
    /// An element, or for `warrants` a `supports` link.
    pub to: Id,
    pub qualifier: Option<Qualifier>,
}

impl Link {
    pub fn new(id: Id, kind: LinkKind, from: Id, to: Id) -> Self {
        Link { id, kind, from, to, qualifier: None }
    }

    pub fn supports(id: Id, from: Id, to: Id) -> Self {
        Link::new(id, LinkKind::Supports, from, to)
    }

    pub fn context_of(id: Id, from: Id, to: Id) -> Self {
        Link::new(id, LinkKind::ContextOf, from, to)
    }

    pub fn evidences(id: Id, from: Id, to: Id) -> Self {
        Link::new(id, LinkKind::Evidences, from, to)
    }

    pub fn warrants(id: Id, warrant: Id, link: Id) -> Self {
        Link::new(id, LinkKind::Warrants, warrant, link)
    }

    pub fn with_qualifier(mut self, qualifier: Qualifier) -> Self {
        self.qualifier = Some(qualifier);
        self
    }
}

keyword_enum! {
    pub enum ChallengeState {
        Open => "open",
        Withdrawn => "withdrawn",
        Sustained => "sustained",
        Resolved => "resolved",
    }
}

keyword_enum! {
    /// Terminal states a challenge may be moved to.
    pub enum Outcome {
        Withdrawn => "withdrawn",
        Sustained => "sustained",
        Resolved => "resolved",
    }
}

impl From<Outcome> for ChallengeState {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Withdrawn => ChallengeState::Withdrawn,
            Outcome::Sustained => ChallengeState::Sustained,
            Outcome::Resolved => ChallengeState::Resolved,
        }
    }
}

impl ChallengeState {
    pub fn requires_note(self) -> bool {
        matches!(self, ChallengeState::Sustained | ChallengeState::Resolved)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Challenge {
    pub id: Id,
    pub target: Id,
    pub author: String,
    pub text: String,
    pub state: ChallengeState,
    pub resolution_note: Option<String>,
}

impl Challenge {
    pub fn open(id: Id, target: Id, author: impl Into<String>, text: impl Into<String>) -> Self {
        Challenge {
            id,
            target,
            author: author.into(),
            text: text.into(),
            state: ChallengeState::Open,
            resolution_note: None,
        }
    }
}

/// A UTC instant truncated to whole seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

impl Timestamp {
    pub fn from_unix(secs: i64) -> Option<Self> {
        DateTime::<Utc>::from_timestamp(secs, 0).map(|_| Timestamp(secs))
    }

    pub fn now() -> Self {
        Timestamp(Utc::now().timestamp())
    }

    pub fn unix(self) -> i64 {
        self.0
    }

    pub fn parse(s: &str) -> Option<Self> {
        NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
            .ok()
            .map(|dt| Timestamp(dt.and_utc().timestamp()))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dt = DateTime::<Utc>::from_timestamp(self.0, 0).expect("range checked on construction");
        write!(f, "{}", dt.format(TIMESTAMP_FORMAT))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Timestamp::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid timestamp {s:?}, expected YYYY-MM-DDTHH:MM:SSZ")))
    }
}

/// Text fields must be non-blank and fit on one line of the case language.
pub fn is_valid_text(s: &str) -> bool {
    !s.trim().is_empty() && !s.contains(['\n', '\r'])
}

use crate::Id;
