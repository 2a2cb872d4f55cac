//! Evidence appraisal (relevance, materiality, admissibility plus an
//! assessor-supplied probative value) and the three-level sufficiency
//! assessment built on top of it.
//!
//! Aggregation: an evidential claim takes the best of its alternative
//! evidence; every other claim takes the weakest of its supporting children.
//! An unassessed constituent makes the whole chain above it unassessed, and a
//! defeated element contributes zero.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::keyword::keyword_enum;
use crate::model::{Case, ElementKind, LinkKind};
use crate::validation::{compute_status, Status};
use crate::Id;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

keyword_enum! {
    pub enum Relevance {
        Relevant => "relevant",
        Irrelevant => "irrelevant",
    }
}

keyword_enum! {
    pub enum Materiality {
        Material => "material",
        Immaterial => "immaterial",
    }
}

keyword_enum! {
    pub enum Admissibility {
        Admissible => "admissible",
        Inadmissible => "inadmissible",
    }
}

/// A verdict with the assessor's optional justification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assessed<T> {
    pub verdict: T,
    pub note: Option<String>,
}

impl<T> Assessed<T> {
    pub fn new(verdict: T) -> Self {
        Assessed { verdict, note: None }
    }

    pub fn noted(verdict: T, note: impl Into<String>) -> Self {
        Assessed { verdict, note: Some(note.into()) }
    }
}

/// A value on the closed unit interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct UnitValue(f64);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("value {0} is outside [0, 1]")]
pub struct ValueOutOfRange(pub f64);

impl UnitValue {
    pub fn new(v: f64) -> Result<Self, ValueOutOfRange> {
        if (0.0..=1.0).contains(&v) {
            // normalise -0.0 so equality and text form agree
            Ok(UnitValue(v + 0.0))
        } else {
            Err(ValueOutOfRange(v))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Eq for UnitValue {}

impl std::hash::Hash for UnitValue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for UnitValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
        UnitValue::new(v).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AppraisalRecord {
    pub evidence: Id,
    pub relevance: Assessed<Relevance>,
    pub materiality: Assessed<Materiality>,
    pub admissibility: Assessed<Admissibility>,
    pub probative_value: UnitValue,
    pub assessor: String,
    pub date: NaiveDate,
}

impl AppraisalRecord {
    /// All three verdicts positive.
    pub fn passes_triad(&self) -> bool {
        self.relevance.verdict == Relevance::Relevant
            && self.materiality.verdict == Materiality::Material
            && self.admissibility.verdict == Admissibility::Admissible
    }

    /// Probative value once the triad gate is applied.
    pub fn effective_value(&self) -> f64 {
        if self.passes_triad() {
            self.probative_value.get()
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppraisalError {
    #[error("`{0}` is not an Evidence element")]
    NotEvidence(Id),
    #[error("probative value {0} is outside [0, 1]")]
    ValueOutOfRange(String),
    #[error("assessor and notes must be non-empty single-line text")]
    InvalidText,
    #[error("case has no Goal element")]
    NoGoal,
    #[error("threshold {0} is outside [0, 1]")]
    ThresholdOutOfRange(String),
}

/// Stores `record`, replacing any earlier appraisal of the same evidence.
pub fn record_appraisal(case: &Case, record: AppraisalRecord) -> Result<Case, AppraisalError> {
    let mut next = case.clone();
    if let Some(prior) = store_appraisal(&mut next, record)? {
        log::info!(
            "appraisal of `{}` by {} on {} superseded",
            prior.evidence,
            prior.assessor,
            prior.date
        );
    }
    Ok(next)
}

pub(crate) fn store_appraisal(
    case: &mut Case,
    record: AppraisalRecord,
) -> Result<Option<AppraisalRecord>, AppraisalError> {
    match case.element(record.evidence.as_str()) {
        Some(e) if e.kind == ElementKind::Evidence => {}
        _ => return Err(AppraisalError::NotEvidence(record.evidence)),
    }
    let notes = [&record.relevance.note, &record.materiality.note, &record.admissibility.note];
    let texts_ok = crate::model::is_valid_text(&record.assessor)
        && notes.iter().all(|n| n.as_deref().is_none_or(crate::model::is_valid_text));
    if !texts_ok {
        return Err(AppraisalError::InvalidText);
    }
    Ok(case.put_appraisal(record))
}

keyword_enum! {
    pub enum Verdict {
        Sufficient => "sufficient",
        Insufficient => "insufficient",
        Unassessed => "unassessed",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assessment {
    /// `None` when any constituent is unassessed.
    pub value: Option<f64>,
    pub verdict: Verdict,
}

impl Assessment {
    fn of(value: Option<f64>, threshold: f64) -> Self {
        let verdict = match value {
            None => Verdict::Unassessed,
            Some(v) if v >= threshold => Verdict::Sufficient,
            Some(_) => Verdict::Insufficient,
        };
        Assessment { value, verdict }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub threshold: f64,
    pub per_evidence: BTreeMap<Id, Option<f64>>,
    pub per_claim: BTreeMap<Id, Assessment>,
    pub case_value: Assessment,
}

/// Computes per-evidence, per-claim and whole-case sufficiency.
pub fn sufficiency(case: &Case, threshold: f64) -> Result<SufficiencyReport, AppraisalError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(AppraisalError::ThresholdOutOfRange(threshold.to_string()));
    }
    if case.goals().next().is_none() {
        return Err(AppraisalError::NoGoal);
    }
    let statuses = compute_status(case).expect("case invariants keep supports acyclic");
    let defeated = |id: &Id| statuses.get(id) == Some(&Status::Defeated);

    let per_evidence: BTreeMap<Id, Option<f64>> = case
        .elements()
        .values()
        .filter(|e| e.kind == ElementKind::Evidence)
        .map(|e| {
            let v = if defeated(&e.id) {
                Some(0.0)
            } else {
                case.appraisals().get(&e.id).map(AppraisalRecord::effective_value)
            };
            (e.id.clone(), v)
        })
        .collect();

    let order = case.graph().supports_order().expect("acyclic");
    let mut values: BTreeMap<Id, Option<f64>> = BTreeMap::new();
    for id in order {
        let e = &case.elements()[&id];
        let v = match e.kind {
            ElementKind::EvidentialClaim | ElementKind::PropertyClaim | ElementKind::Goal if defeated(&id) => {
                Some(0.0)
            }
            ElementKind::EvidentialClaim => {
                let alternatives: Vec<Option<f64>> = case
                    .graph()
                    .links_into(id.as_str())
                    .filter(|l| l.kind == LinkKind::Evidences)
                    .map(|l| per_evidence[&l.from])
                    .collect();
                combine(&alternatives, f64::max)
            }
            ElementKind::PropertyClaim | ElementKind::Goal => {
                let conjuncts: Vec<Option<f64>> = case
                    .graph()
                    .links_into(id.as_str())
                    .filter(|l| l.kind == LinkKind::Supports)
                    .map(|l| values[&l.from])
                    .collect();
                combine(&conjuncts, f64::min)
            }
            _ => continue,
        };
        values.insert(id, v);
    }

    let roots: Vec<Option<f64>> = case.root_goals().map(|g| values[&g.id]).collect();
    // every goal supporting another goal leaves at least one root
    let case_value = combine(&roots, f64::min);
    let per_claim = values.into_iter().map(|(k, v)| (k, Assessment::of(v, threshold))).collect();
    Ok(SufficiencyReport { threshold, per_evidence, per_claim, case_value: Assessment::of(case_value, threshold) })
}

/// Folds constituent values; empty or any-unassessed yields unassessed.
fn combine(parts: &[Option<f64>], f: fn(f64, f64) -> f64) -> Option<f64> {
    let mut acc: Option<f64> = None;
    for p in parts {
        let v = (*p)?;
        acc = Some(acc.map_or(v, |a| f(a, v)));
    }
    acc
}
