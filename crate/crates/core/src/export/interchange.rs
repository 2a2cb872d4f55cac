//! The JSON interchange document.
//!
//! Keys are sorted, arrays are sorted by id, absent optional fields are
//! omitted, and the text ends with a line feed.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::appraisal::{
    store_appraisal, Admissibility, AppraisalError, AppraisalRecord, Assessed, Materiality, Relevance, SufficiencyReport,
    UnitValue,
};
use crate::dsl::codes;
use crate::lifecycle::LifecycleStage;
use crate::model::{
    AudienceTier, Case, Challenge, ChallengeState, Element, ElementKind, GoalSlots, Link, LinkKind, Locator, ModelError,
    Phase, Qualifier, QualifierLabel, Scope, Timestamp,
};
use crate::Id;

pub const INTERCHANGE_VERSION: &str = "1";

pub mod diag_codes {
    pub const JSON: &str = "E-JSON";
    pub const UNKNOWN_VERSION: &str = "E-UNKNOWN-VERSION";
    pub const SCHEMA: &str = "E-SCHEMA";
}

/// A problem with an interchange document, located by JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterchangeDiagnostic {
    pub code: &'static str,
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for InterchangeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pointer = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{} {} {}", self.code, pointer, self.message)
    }
}

fn diag(code: &'static str, pointer: impl Into<String>, message: impl Into<String>) -> InterchangeDiagnostic {
    InterchangeDiagnostic { code, pointer: pointer.into(), message: message.into() }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: String,
    case: CaseDoc,
    elements: Vec<ElementDoc>,
    links: Vec<LinkDoc>,
    challenges: Vec<ChallengeDoc>,
    appraisals: Vec<AppraisalDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseDoc {
    id: Id,
    title: String,
    phase: Phase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    created: Option<Timestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modified: Option<Timestamp>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlotsDoc {
    system: String,
    context: String,
    goal: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDoc {
    id: Id,
    kind: ElementKind,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stage: Option<LifecycleStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scope: Option<Scope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slots: Option<SlotsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    locator: Option<String>,
    tier: AudienceTier,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QualifierDoc {
    label: QualifierLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    id: Id,
    kind: LinkKind,
    from: Id,
    to: Id,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qualifier: Option<QualifierDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ChallengeDoc {
    id: Id,
    target: Id,
    author: String,
    text: String,
    state: ChallengeState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution_note: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerdictDoc<T> {
    verdict: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl<T> From<&Assessed<T>> for VerdictDoc<T>
where
    T: Copy,
{
    fn from(a: &Assessed<T>) -> Self {
        VerdictDoc { verdict: a.verdict, note: a.note.clone() }
    }
}

impl<T> From<VerdictDoc<T>> for Assessed<T> {
    fn from(v: VerdictDoc<T>) -> Self {
        Assessed { verdict: v.verdict, note: v.note }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct AppraisalDoc {
    evidence: Id,
    relevance: VerdictDoc<Relevance>,
    materiality: VerdictDoc<Materiality>,
    admissibility: VerdictDoc<Admissibility>,
    probative_value: f64,
    assessor: String,
    date: NaiveDate,
}

/// Pretty-printed JSON with sorted keys and a trailing line feed.
pub(crate) fn canonical_json(value: &impl Serialize) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is enabled
    let v = serde_json::to_value(value).expect("documents serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

pub fn to_interchange(case: &Case) -> String {
    let doc = Document {
        version: INTERCHANGE_VERSION.to_string(),
        case: CaseDoc {
            id: case.id().clone(),
            title: case.title().to_string(),
            phase: case.phase(),
            created: case.created(),
            modified: case.modified(),
        },
        elements: case
            .elements()
            .values()
            .map(|e| ElementDoc {
                id: e.id.clone(),
                kind: e.kind,
                text: e.text.clone(),
                stage: e.stage,
                scope: e.scope,
                slots: e.slots.as_ref().map(|s| SlotsDoc {
                    system: s.system().into(),
                    context: s.context().into(),
                    goal: s.goal().into(),
                }),
                locator: e.locator.as_ref().map(ToString::to_string),
                tier: e.tier,
            })
            .collect(),
        links: case
            .links()
            .values()
            .map(|l| LinkDoc {
                id: l.id.clone(),
                kind: l.kind,
                from: l.from.clone(),
                to: l.to.clone(),
                qualifier: l.qualifier.as_ref().map(|q| QualifierDoc { label: q.label, note: q.note.clone() }),
            })
            .collect(),
        challenges: case
            .challenges()
            .values()
            .map(|c| ChallengeDoc {
                id: c.id.clone(),
                target: c.target.clone(),
                author: c.author.clone(),
                text: c.text.clone(),
                state: c.state,
                resolution_note: c.resolution_note.clone(),
            })
            .collect(),
        appraisals: case
            .appraisals()
            .values()
            .map(|a| AppraisalDoc {
                evidence: a.evidence.clone(),
                relevance: (&a.relevance).into(),
                materiality: (&a.materiality).into(),
                admissibility: (&a.admissibility).into(),
                probative_value: a.probative_value.get(),
                assessor: a.assessor.clone(),
                date: a.date,
            })
            .collect(),
    };
    canonical_json(&doc)
}

/// `{"version": "1", "sufficiency": …}`
pub fn sufficiency_document(report: &SufficiencyReport) -> String {
    canonical_json(&serde_json::json!({ "version": INTERCHANGE_VERSION, "sufficiency": report }))
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

fn model_code(err: &ModelError) -> &'static str {
    crate::dsl::parser::model_diag(crate::dsl::SourceSpan::new(1, 1, 1), err).code
}

pub fn from_interchange(bytes: &[u8]) -> Result<Case, Vec<InterchangeDiagnostic>> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| vec![diag(diag_codes::JSON, "", e.to_string())])?;
    match value.get("version") {
        Some(Value::String(v)) if v == INTERCHANGE_VERSION => {}
        Some(v) => {
            return Err(vec![diag(
                diag_codes::UNKNOWN_VERSION,
                "/version",
                format!("unknown interchange version {v}; expected \"{INTERCHANGE_VERSION}\""),
            )])
        }
        None => return Err(vec![diag(diag_codes::UNKNOWN_VERSION, "/version", "missing version")]),
    }
    let doc: Document = serde_path_to_error::deserialize(&value)
        .map_err(|e| vec![diag(diag_codes::SCHEMA, pointer_of(e.path()), e.inner().to_string())])?;
    build(doc)
}

fn build(doc: Document) -> Result<Case, Vec<InterchangeDiagnostic>> {
    let mut diags = Vec::new();
    let mut case = Case::new(doc.case.id, doc.case.title, doc.case.phase)
        .map_err(|e| vec![diag(codes::EMPTY_TEXT, "/case/title", e.to_string())])?
        .with_timestamps(doc.case.created, doc.case.modified);
    for (i, e) in doc.elements.into_iter().enumerate() {
        let at = format!("/elements/{i}");
        let mut element = Element::of_kind(e.id, e.kind, e.text);
        element.stage = e.stage;
        element.scope = e.scope;
        element.tier = e.tier;
        if let Some(s) = e.slots {
            match GoalSlots::new(s.system, s.context, s.goal) {
                Ok(slots) => element.slots = Some(slots),
                Err(err) => {
                    diags.push(diag(codes::GOAL_SLOTS, format!("{at}/slots"), err.to_string()));
                    continue;
                }
            }
        }
        if let Some(l) = e.locator {
            match Locator::parse(&l) {
                Ok(loc) => element.locator = Some(loc),
                Err(err) => {
                    diags.push(diag(codes::BAD_LOCATOR, format!("{at}/locator"), err.to_string()));
                    continue;
                }
            }
        }
        if let Err(err) = case.push_element(element) {
            let at = match err {
                ModelError::DuplicateId(_) => format!("{at}/id"),
                _ => at,
            };
            diags.push(diag(model_code(&err), at, err.to_string()));
        }
    }
    let links: Vec<(usize, LinkDoc)> = doc.links.into_iter().enumerate().collect();
    let (warrants, others): (Vec<_>, Vec<_>) = links.into_iter().partition(|(_, l)| l.kind == LinkKind::Warrants);
    for (i, l) in others.into_iter().chain(warrants) {
        let at = format!("/links/{i}");
        let mut link = Link::new(l.id, l.kind, l.from, l.to);
        link.qualifier = l.qualifier.map(|q| Qualifier { label: q.label, note: q.note });
        let (from, to) = (link.from.clone(), link.to.clone());
        if let Err(err) = case.push_link(link) {
            let at = match &err {
                ModelError::DanglingEndpoint { endpoint, .. } if *endpoint == from => format!("{at}/from"),
                ModelError::DanglingEndpoint { endpoint, .. } if *endpoint == to => format!("{at}/to"),
                ModelError::DuplicateId(_) => format!("{at}/id"),
                ModelError::QualifierNotPermitted { .. } => format!("{at}/qualifier"),
                _ => at,
            };
            diags.push(diag(model_code(&err), at, err.to_string()));
        }
    }
    for (i, a) in doc.appraisals.into_iter().enumerate() {
        let at = format!("/appraisals/{i}");
        let probative_value = match UnitValue::new(a.probative_value) {
            Ok(v) => v,
            Err(err) => {
                diags.push(diag(codes::VALUE_RANGE, format!("{at}/probativeValue"), err.to_string()));
                continue;
            }
        };
        let record = AppraisalRecord {
            evidence: a.evidence,
            relevance: a.relevance.into(),
            materiality: a.materiality.into(),
            admissibility: a.admissibility.into(),
            probative_value,
            assessor: a.assessor,
            date: a.date,
        };
        match store_appraisal(&mut case, record) {
            Ok(None) => {}
            Ok(Some(prior)) => {
                diags.push(diag(codes::DUPLICATE_ID, format!("{at}/evidence"), format!("`{}` appraised twice", prior.evidence)))
            }
            Err(err @ AppraisalError::NotEvidence(_)) => {
                diags.push(diag(codes::NOT_EVIDENCE, format!("{at}/evidence"), err.to_string()))
            }
            Err(err) => diags.push(diag(codes::EMPTY_TEXT, at, err.to_string())),
        }
    }
    for (i, c) in doc.challenges.into_iter().enumerate() {
        let at = format!("/challenges/{i}");
        let challenge = Challenge {
            id: c.id,
            target: c.target,
            author: c.author,
            text: c.text,
            state: c.state,
            resolution_note: c.resolution_note,
        };
        if let Err(err) = case.push_challenge(challenge) {
            let at = match err {
                ModelError::DanglingTarget { .. } => format!("{at}/target"),
                ModelError::DuplicateId(_) => format!("{at}/id"),
                ModelError::NoteRequired { .. } => format!("{at}/resolutionNote"),
                _ => at,
            };
            diags.push(diag(model_code(&err), at, err.to_string()));
        }
    }
    if diags.is_empty() {
        Ok(case)
    } else {
        Err(diags)
    }
}
