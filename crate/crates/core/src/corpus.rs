//! Shipped fixtures: the healthcare running example, smaller worked
//! examples, and seeded-defect variants, each with machine-readable
//! expectations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

use crate::dsl::{parse, ParseDiagnostic};
use crate::model::Case;
use crate::patterns::{parse_pattern, Pattern};
use crate::validation::validate;

macro_rules! sources {
    ($($file:literal),+ $(,)?) => {
        &[$(($file, include_str!(concat!("../../../corpus/", $file)))),+]
    };
}

static SOURCES: &[(&str, &str)] = sources![
    "healthcare.eac",
    "healthcare-diagnostic-bias.eac",
    "fig7-toulmin.eac",
    "all-stages.eac",
    "two-goals.eac",
    "derive-a.eac",
    "derive-b.eac",
    "underspecified-goal.eac",
    "missing-warrant.eac",
    "unevidenced.eac",
    "cycle.eac",
    "orphan.eac",
    "duplicate-id.eac",
    "interpretability.eap",
];

static MANIFEST: &str = include_str!("../../../corpus/fixtures.toml");

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Expectations {
    /// Exact set of codes reported when the file is validated.
    pub codes: BTreeSet<String>,
    pub elements: Option<usize>,
    pub covered_stages: Option<usize>,
    pub redacted_at_public: Option<usize>,
    #[serde(default)]
    pub statuses: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub file: String,
    pub description: String,
    /// Seeded-defect fixture.
    #[serde(default)]
    pub broken: bool,
    #[serde(flatten)]
    pub expected: Expectations,
}

impl Fixture {
    /// Path relative to the corpus directory.
    pub fn path(&self) -> String {
        format!("corpus/{}", self.file)
    }

    pub fn source(&self) -> &'static str {
        source(&self.file).expect("manifest names shipped files")
    }
}

#[derive(Deserialize)]
struct Manifest {
    fixture: Vec<Fixture>,
}

#[derive(Debug, Error, PartialEq)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture `{name}` does not parse ({} diagnostic(s))", diagnostics.len())]
    Parse { name: String, diagnostics: Vec<ParseDiagnostic> },
}

/// Text of a shipped corpus file.
pub fn source(file: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(f, _)| *f == file).map(|(_, s)| *s)
}

pub fn fixtures() -> &'static [Fixture] {
    static PARSED: OnceLock<Vec<Fixture>> = OnceLock::new();
    PARSED.get_or_init(|| {
        let m: Manifest = toml::from_str(MANIFEST).expect("corpus manifest is well formed");
        m.fixture
    })
}

pub fn fixture(name: &str) -> Result<&'static Fixture, FixtureError> {
    fixtures().iter().find(|f| f.name == name).ok_or_else(|| FixtureError::UnknownFixture(name.to_string()))
}

pub fn load_fixture(name: &str) -> Result<(Case, Expectations), FixtureError> {
    let f = fixture(name)?;
    let parsed = parse(f.source()).map_err(|diagnostics| FixtureError::Parse { name: name.to_string(), diagnostics })?;
    Ok((parsed.case, f.expected.clone()))
}

/// Codes reported for `source`: parse diagnostics when it does not parse,
/// otherwise validation findings at its own phase.
pub fn reported_codes(source: &str) -> BTreeSet<String> {
    match parse(source) {
        Err(diags) => diags.iter().map(|d| d.code.to_string()).collect(),
        Ok(p) => validate(&p.case).findings.into_iter().map(|f| f.code).collect(),
    }
}

/// The shipped interpretability pattern.
pub fn interpretability_pattern() -> Pattern {
    parse_pattern(source("interpretability.eap").expect("shipped")).expect("shipped pattern parses").pattern
}
