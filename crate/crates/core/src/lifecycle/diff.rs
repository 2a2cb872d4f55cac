use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::snapshot::Snapshot;
use crate::appraisal::AppraisalRecord;
use crate::dsl::ParseDiagnostic;
use crate::model::{Case, Challenge, Element, Link, Phase};
use crate::validation::{compute_status, Status};
use crate::Id;

#[derive(Debug, Error, PartialEq)]
pub enum DiffError {
    #[error("snapshot `{label}` does not parse")]
    ParseFailure { label: String, diagnostics: Vec<ParseDiagnostic> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldChange {
    pub field: &'static str,
    pub before: Option<String>,
    pub after: Option<String>,
}

impl FieldChange {
    fn swapped(&self) -> Self {
        FieldChange { field: self.field, before: self.after.clone(), after: self.before.clone() }
    }
}

/// Field-level changes to one element, link, challenge or appraisal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementChange {
    pub id: Id,
    pub fields: Vec<FieldChange>,
}

/// Added, removed and modified entries of one collection.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Changes {
    pub added: Vec<Id>,
    pub removed: Vec<Id>,
    pub modified: Vec<ElementChange>,
}

impl Changes {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.modified.is_empty()
    }

    fn swapped(&self) -> Self {
        Changes {
            added: self.removed.clone(),
            removed: self.added.clone(),
            modified: self
                .modified
                .iter()
                .map(|m| ElementChange { id: m.id.clone(), fields: m.fields.iter().map(FieldChange::swapped).collect() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ChangeSet {
    /// Case id, title and timestamps.
    pub metadata: Vec<FieldChange>,
    pub phase_change: Option<(Phase, Phase)>,
    pub elements: Changes,
    pub links: Changes,
    pub challenges: Changes,
    pub appraisals: Changes,
    /// Elements present on both sides whose status differs.
    pub status_deltas: BTreeMap<Id, (Status, Status)>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.metadata.is_empty()
            && self.phase_change.is_none()
            && self.elements.is_empty()
            && self.links.is_empty()
            && self.challenges.is_empty()
            && self.appraisals.is_empty()
            && self.status_deltas.is_empty()
    }

    /// The change set of the reverse comparison.
    pub fn swapped(&self) -> Self {
        ChangeSet {
            metadata: self.metadata.iter().map(FieldChange::swapped).collect(),
            phase_change: self.phase_change.map(|(a, b)| (b, a)),
            elements: self.elements.swapped(),
            links: self.links.swapped(),
            challenges: self.challenges.swapped(),
            appraisals: self.appraisals.swapped(),
            status_deltas: self.status_deltas.iter().map(|(k, (a, b))| (k.clone(), (*b, *a))).collect(),
        }
    }
}

type Fields = Vec<(&'static str, Option<String>)>;

fn element_fields(e: &Element) -> Fields {
    let slots = e.slots.as_ref();
    vec![
        ("kind", Some(e.kind.to_string())),
        ("text", Some(e.text.clone())),
        ("stage", e.stage.map(|s| s.to_string())),
        ("scope", e.scope.map(|s| s.to_string())),
        ("slots.system", slots.map(|s| s.system().to_string())),
        ("slots.context", slots.map(|s| s.context().to_string())),
        ("slots.goal", slots.map(|s| s.goal().to_string())),
        ("locator", e.locator.as_ref().map(|l| l.to_string())),
        ("tier", Some(e.tier.to_string())),
    ]
}

fn link_fields(l: &Link) -> Fields {
    vec![
        ("kind", Some(l.kind.to_string())),
        ("from", Some(l.from.to_string())),
        ("to", Some(l.to.to_string())),
        ("qualifier", l.qualifier.as_ref().map(|q| q.label.to_string())),
        ("qualifier.note", l.qualifier.as_ref().and_then(|q| q.note.clone())),
    ]
}

fn challenge_fields(c: &Challenge) -> Fields {
    vec![
        ("target", Some(c.target.to_string())),
        ("author", Some(c.author.clone())),
        ("text", Some(c.text.clone())),
        ("state", Some(c.state.to_string())),
        ("resolution_note", c.resolution_note.clone()),
    ]
}

fn appraisal_fields(a: &AppraisalRecord) -> Fields {
    vec![
        ("relevance", Some(a.relevance.verdict.to_string())),
        ("relevance.note", a.relevance.note.clone()),
        ("materiality", Some(a.materiality.verdict.to_string())),
        ("materiality.note", a.materiality.note.clone()),
        ("admissibility", Some(a.admissibility.verdict.to_string())),
        ("admissibility.note", a.admissibility.note.clone()),
        ("probative_value", Some(a.probative_value.to_string())),
        ("assessor", Some(a.assessor.clone())),
        ("date", Some(a.date.to_string())),
    ]
}

fn field_diff(before: Fields, after: Fields) -> Vec<FieldChange> {
    before
        .into_iter()
        .zip(after)
        .filter(|((_, a), (_, b))| a != b)
        .map(|((field, a), (_, b))| FieldChange { field, before: a, after: b })
        .collect()
}

fn collection<T>(a: &BTreeMap<Id, T>, b: &BTreeMap<Id, T>, fields: fn(&T) -> Fields) -> Changes {
    let mut out = Changes::default();
    for (id, x) in a {
        match b.get(id) {
            None => out.removed.push(id.clone()),
            Some(y) => {
                let changed = field_diff(fields(x), fields(y));
                if !changed.is_empty() {
                    out.modified.push(ElementChange { id: id.clone(), fields: changed });
                }
            }
        }
    }
    out.added = b.keys().filter(|id| !a.contains_key(*id)).cloned().collect();
    out
}

/// Compares two cases field by field and recomputes status on both sides.
pub fn diff_cases(a: &Case, b: &Case) -> ChangeSet {
    let meta = |c: &Case| -> Fields {
        vec![
            ("id", Some(c.id().to_string())),
            ("title", Some(c.title().to_string())),
            ("created", c.created().map(|t| t.to_string())),
            ("modified", c.modified().map(|t| t.to_string())),
        ]
    };
    let sa = compute_status(a).unwrap_or_default();
    let sb = compute_status(b).unwrap_or_default();
    let status_deltas = sa
        .iter()
        .filter_map(|(id, before)| match sb.get(id) {
            Some(after) if after != before => Some((id.clone(), (*before, *after))),
            _ => None,
        })
        .collect();
    ChangeSet {
        metadata: field_diff(meta(a), meta(b)),
        phase_change: (a.phase() != b.phase()).then(|| (a.phase(), b.phase())),
        elements: collection(a.elements(), b.elements(), element_fields),
        links: collection(a.links(), b.links(), link_fields),
        challenges: collection(a.challenges(), b.challenges(), challenge_fields),
        appraisals: collection(a.appraisals(), b.appraisals(), appraisal_fields),
        status_deltas,
    }
}

pub fn diff(a: &Snapshot, b: &Snapshot) -> Result<ChangeSet, DiffError> {
    let load = |s: &Snapshot| {
        s.case().map_err(|diagnostics| DiffError::ParseFailure { label: s.label.to_string(), diagnostics })
    };
    Ok(diff_cases(&load(a)?, &load(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id;
    use crate::model::{Challenge, Element};

    #[test]
    fn field_level_changes() {
        let a = Case::new(id!("c"), "t", Phase::Preliminary)
            .unwrap()
            .add_element(Element::warrant(id!("W"), "old"))
            .unwrap();
        let mut w = a.elements()[&id!("W")].clone();
        w.text = "new".into();
        let b = a.remove_element("W").unwrap().add_element(w).unwrap().with_phase(Phase::Interim);
        let d = diff_cases(&a, &b);
        assert_eq!(d.phase_change, Some((Phase::Preliminary, Phase::Interim)));
        assert_eq!(d.elements.modified[0].fields[0].field, "text");
        assert_eq!(diff_cases(&b, &a), d.swapped());
        assert!(diff_cases(&a, &a).is_empty());
    }

    #[test]
    fn challenge_addition_reports_status_delta() {
        let a = Case::new(id!("c"), "t", Phase::Preliminary)
            .unwrap()
            .add_element(Element::warrant(id!("W"), "w"))
            .unwrap();
        let b = a.attach_challenge(Challenge::open(id!("C1"), id!("W"), "r", "why")).unwrap();
        let d = diff_cases(&a, &b);
        assert_eq!(d.challenges.added, vec![id!("C1")]);
        assert_eq!(d.status_deltas[&id!("W")], (Status::Supported, Status::Contested));
    }
}
