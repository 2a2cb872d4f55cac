//! Argument patterns: slotted case fragments with intent, applicability and
//! risk metadata, instantiated top-down or derived bottom-up from cases.

mod derive;
mod file;
mod iso;
mod template;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::keyword::keyword_enum;
use crate::lifecycle::LifecycleStage;
use crate::model::{is_valid_text, Case, Element, Fragment, GoalSlots, Link, LinkKind, Locator, ModelError};
use crate::Id;

pub use derive::{derive, derive_with_bindings, DeriveFailure};
pub use file::{parse_pattern, serialize_pattern, ParsedPattern};
pub use iso::{isomorphic, isomorphic_cases};
pub use template::{escape, is_valid_slot_name, placeholder, slots_in, substitute, TemplateSyntaxError};

keyword_enum! {
    pub enum SlotType {
        FreeText => "free-text",
        System => "system",
        Context => "context",
        Goal => "goal",
        Stage => "stage",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub id: Id,
    pub intent: String,
    pub applicability: String,
    pub risks: Vec<String>,
    pub skeleton: Fragment,
    pub slot_types: BTreeMap<String, SlotType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("slot(s) used but not declared: {}", .0.join(", "))]
    UndeclaredSlot(Vec<String>),
    #[error("element `{id}`: {error}")]
    Template { id: Id, error: TemplateSyntaxError },
    #[error("intent, applicability and risks must be non-blank single lines")]
    InvalidMetadata,
}

/// A goal whose text is exactly its rendered slots carries no template of its own.
pub(crate) fn derived_goal_text(e: &Element) -> bool {
    e.slots.as_ref().is_some_and(|s| s.render() == e.text)
}

/// Template-bearing text fields of an element, by field name.
pub(crate) fn element_templates(e: &Element) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if !derived_goal_text(e) {
        out.push(("text", e.text.clone()));
    }
    if let Some(s) = &e.slots {
        out.push(("system", s.system().to_string()));
        out.push(("context", s.context().to_string()));
        out.push(("goal", s.goal().to_string()));
    }
    if let Some(l) = &e.locator {
        out.push(("locator", l.to_string()));
    }
    out
}

pub(crate) fn link_templates(l: &Link) -> Option<String> {
    l.qualifier.as_ref().and_then(|q| q.note.clone())
}

impl Pattern {
    pub fn new(
        id: Id,
        intent: impl Into<String>,
        applicability: impl Into<String>,
        risks: Vec<String>,
        skeleton: Fragment,
        slot_types: BTreeMap<String, SlotType>,
    ) -> Result<Pattern, PatternError> {
        let p = Pattern { id, intent: intent.into(), applicability: applicability.into(), risks, skeleton, slot_types };
        let meta_ok = is_valid_text(&p.intent) && is_valid_text(&p.applicability) && p.risks.iter().all(|r| is_valid_text(r));
        if !meta_ok {
            return Err(PatternError::InvalidMetadata);
        }
        let undeclared: Vec<String> = p.slots_used()?.into_iter().filter(|s| !p.slot_types.contains_key(s)).collect();
        if !undeclared.is_empty() {
            return Err(PatternError::UndeclaredSlot(undeclared));
        }
        Ok(p)
    }

    /// Every slot name occurring in the skeleton.
    pub fn slots_used(&self) -> Result<BTreeSet<String>, PatternError> {
        let mut out = BTreeSet::new();
        for e in self.skeleton.elements().values() {
            for (_, t) in element_templates(e) {
                out.extend(slots_in(&t).map_err(|error| PatternError::Template { id: e.id.clone(), error })?);
            }
        }
        for l in self.skeleton.links().values() {
            if let Some(t) = link_templates(l) {
                out.extend(slots_in(&t).map_err(|error| PatternError::Template { id: l.id.clone(), error })?);
            }
        }
        Ok(out)
    }

    /// Lifecycle stages tagged anywhere in the skeleton.
    pub fn stages(&self) -> BTreeSet<LifecycleStage> {
        self.skeleton.elements().values().filter_map(|e| e.stage).collect()
    }
}

/// Slot values supplied to [`instantiate`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Bindings(BTreeMap<String, String>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindingError {
    #[error("binding for `{0}` is blank or spans lines")]
    Blank(String),
    #[error("binding for `{0}` contains a template brace")]
    Brace(String),
    #[error("invalid slot name {0:?}")]
    BadName(String),
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn bind(mut self, slot: impl Into<String>, value: impl Into<String>) -> Result<Self, BindingError> {
        let (slot, value) = (slot.into(), value.into());
        if !is_valid_slot_name(&slot) {
            return Err(BindingError::BadName(slot));
        }
        if !is_valid_text(&value) {
            return Err(BindingError::Blank(slot));
        }
        if value.contains(['{', '}']) {
            return Err(BindingError::Brace(slot));
        }
        self.0.insert(slot, value);
        Ok(self)
    }

    /// Parses `name=value`.
    pub fn bind_pair(self, pair: &str) -> Result<Self, BindingError> {
        match pair.split_once('=') {
            Some((k, v)) => self.bind(k, v),
            None => Err(BindingError::BadName(pair.to_string())),
        }
    }

    pub fn get(&self, slot: &str) -> Option<&str> {
        self.0.get(slot).map(String::as_str)
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("missing binding(s): {}", .0.join(", "))]
    MissingBinding(Vec<String>),
    #[error("binding(s) name no slot: {}", .0.join(", "))]
    UnknownSlot(Vec<String>),
    #[error("invalid id prefix {0:?}")]
    InvalidPrefix(String),
    #[error("slot `{slot}` expects a lifecycle stage, got {value:?}")]
    NotAStage { slot: String, value: String },
    #[error("element `{id}`: {reason}")]
    InvalidElement { id: Id, reason: String },
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn valid_prefix(prefix: &str) -> bool {
    prefix.is_empty() || crate::id::is_valid_id(prefix)
}

/// Replaces every slot with its binding and prefixes every id.
pub fn instantiate(pattern: &Pattern, bindings: &Bindings, prefix: &str) -> Result<Fragment, InstantiateError> {
    if !valid_prefix(prefix) {
        return Err(InstantiateError::InvalidPrefix(prefix.to_string()));
    }
    let missing: Vec<String> =
        pattern.slot_types.keys().filter(|s| bindings.get(s).is_none()).cloned().collect();
    if !missing.is_empty() {
        return Err(InstantiateError::MissingBinding(missing));
    }
    let unknown: Vec<String> =
        bindings.as_map().keys().filter(|s| !pattern.slot_types.contains_key(*s)).cloned().collect();
    if !unknown.is_empty() {
        return Err(InstantiateError::UnknownSlot(unknown));
    }
    for (slot, ty) in &pattern.slot_types {
        let value = &bindings.as_map()[slot];
        if *ty == SlotType::Stage && value.parse::<LifecycleStage>().is_err() {
            return Err(InstantiateError::NotAStage { slot: slot.clone(), value: value.clone() });
        }
    }
    let values = bindings.as_map();
    let rename = |id: &Id| id.prefixed(prefix).map_err(|_| InstantiateError::InvalidPrefix(prefix.to_string()));
    let mut out = Fragment::default();
    for e in pattern.skeleton.elements().values() {
        let invalid = |reason: String| InstantiateError::InvalidElement { id: e.id.clone(), reason };
        let sub = |t: &str| substitute(t, values).map_err(|err| invalid(err.to_string()));
        let mut next = e.clone();
        next.id = rename(&e.id)?;
        if let Some(s) = &e.slots {
            let slots = GoalSlots::new(sub(s.system())?, sub(s.context())?, sub(s.goal())?)
                .map_err(|err| invalid(err.to_string()))?;
            next.text = if derived_goal_text(e) { slots.render() } else { sub(&e.text)? };
            next.slots = Some(slots);
        } else {
            next.text = sub(&e.text)?;
        }
        if let Some(l) = &e.locator {
            next.locator = Some(Locator::parse(&sub(&l.to_string())?).map_err(|err| invalid(err.to_string()))?);
        }
        out.insert_element(next, |_| false)?;
    }
    let (warrants, others): (Vec<&Link>, Vec<&Link>) =
        pattern.skeleton.links().values().partition(|l| l.kind == LinkKind::Warrants);
    for l in others.into_iter().chain(warrants) {
        let mut next = l.clone();
        next.id = rename(&l.id)?;
        next.from = rename(&l.from)?;
        next.to = rename(&l.to)?;
        if let Some(q) = &mut next.qualifier {
            if let Some(n) = &q.note {
                q.note = Some(
                    substitute(n, values)
                        .map_err(|err| InstantiateError::InvalidElement { id: l.id.clone(), reason: err.to_string() })?,
                );
            }
        }
        out.insert_link(next, |_| false)?;
    }
    Ok(out)
}

/// Instantiates `pattern` and merges the result into `host`.
pub fn instantiate_into(
    host: &Case,
    pattern: &Pattern,
    bindings: &Bindings,
    prefix: &str,
) -> Result<Case, InstantiateError> {
    let fragment = instantiate(pattern, bindings, prefix)?;
    Ok(host.merge(&fragment)?)
}

/// What a case is about, for applicability checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CaseMeta {
    pub domain: String,
    pub stages: BTreeSet<LifecycleStage>,
}

impl CaseMeta {
    /// Stages tagged on any element of `case`.
    pub fn of_case(case: &Case, domain: impl Into<String>) -> Self {
        CaseMeta { domain: domain.into(), stages: case.elements().values().filter_map(|e| e.stage).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Advisory {
    Applicability { text: String, domain: String },
    Risk { text: String },
    StageGap { stage: LifecycleStage },
}

impl fmt::Display for Advisory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Advisory::Applicability { text, domain } => write!(f, "applicability (domain: {domain}): {text}"),
            Advisory::Risk { text } => write!(f, "risk: {text}"),
            Advisory::StageGap { stage } => {
                write!(f, "stage gap: pattern addresses `{stage}`, which the case does not cover")
            }
        }
    }
}

/// Advisories only; nothing here blocks instantiation.
pub fn check_applicability(pattern: &Pattern, meta: &CaseMeta) -> Vec<Advisory> {
    let mut out = vec![Advisory::Applicability { text: pattern.applicability.clone(), domain: meta.domain.clone() }];
    out.extend(pattern.risks.iter().map(|r| Advisory::Risk { text: r.clone() }));
    out.extend(pattern.stages().difference(&meta.stages).map(|s| Advisory::StageGap { stage: *s }));
    out
}
