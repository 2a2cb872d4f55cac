use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{
    is_valid_text, Challenge, ChallengeState, Element, ElementKind, KindRule, Link, LinkKind, Outcome, Phase,
    Timestamp,
};
use crate::appraisal::AppraisalRecord;
use crate::Id;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("case title must be non-empty single-line text")]
    InvalidTitle,
    #[error("identifier `{0}` is already in use")]
    DuplicateId(Id),
    #[error("element `{id}` violates kind rule {rule}")]
    KindInvariantViolation { id: Id, rule: KindRule },
    #[error("link `{link}` refers to unknown `{endpoint}`")]
    DanglingEndpoint { link: Id, endpoint: Id },
    #[error("link `{link}`: {kind} is not permitted from {from} to {to}")]
    IncompatibleKinds { link: Id, kind: LinkKind, from: String, to: String },
    #[error("link `{link}`: qualifiers are only permitted on supports links")]
    QualifierNotPermitted { link: Id },
    #[error("link `{link}` duplicates link `{existing}`")]
    DuplicateLink { link: Id, existing: Id },
    #[error("supports cycle: {}", join_path(.path))]
    CycleIntroduced { path: Vec<Id> },
    #[error("challenge `{challenge}` targets unknown `{target}`")]
    DanglingTarget { challenge: Id, target: Id },
    #[error("challenge `{id}` must be open when attached")]
    ChallengeNotOpen { id: Id },
    #[error("challenge `{id}` in state {state} requires a resolution note")]
    NoteRequired { id: Id, state: ChallengeState },
    #[error("challenge `{id}`: {field} must be non-empty single-line text")]
    InvalidChallengeText { id: Id, field: &'static str },
    #[error("`{0}` not found")]
    NotFound(Id),
    #[error("challenge `{id}` is already {state}")]
    AlreadyClosed { id: Id, state: ChallengeState },
}

fn join_path(path: &[Id]) -> String {
    path.iter().map(Id::as_str).collect::<Vec<_>>().join(" -> ")
}

/// Elements and links without case metadata. Used both as the body of a
/// [`Case`] and as the result of instantiating an argument pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fragment {
    pub(crate) elements: BTreeMap<Id, Element>,
    pub(crate) links: BTreeMap<Id, Link>,
}

impl Fragment {
    pub fn elements(&self) -> &BTreeMap<Id, Element> {
        &self.elements
    }

    pub fn links(&self) -> &BTreeMap<Id, Link> {
        &self.links
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.get(id)
    }

    pub fn link(&self, id: &str) -> Option<&Link> {
        self.links.get(id)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty() && self.links.is_empty()
    }

    /// Links whose `to` is `id` (elements) or, for warrants, the link `id`.
    pub fn links_into<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Link> + 'a {
        self.links.values().filter(move |l| l.to.as_str() == id)
    }

    pub fn links_from<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Link> + 'a {
        self.links.values().filter(move |l| l.from.as_str() == id)
    }

    pub(crate) fn has_id(&self, id: &str) -> bool {
        self.elements.contains_key(id) || self.links.contains_key(id)
    }

    pub(crate) fn insert_element(&mut self, element: Element, taken: impl Fn(&str) -> bool) -> Result<(), ModelError> {
        if self.has_id(element.id.as_str()) || taken(element.id.as_str()) {
            return Err(ModelError::DuplicateId(element.id));
        }
        element
            .check()
            .map_err(|rule| ModelError::KindInvariantViolation { id: element.id.clone(), rule })?;
        self.elements.insert(element.id.clone(), element);
        Ok(())
    }

    pub(crate) fn insert_link(&mut self, link: Link, taken: impl Fn(&str) -> bool) -> Result<(), ModelError> {
        if self.has_id(link.id.as_str()) || taken(link.id.as_str()) {
            return Err(ModelError::DuplicateId(link.id));
        }
        self.check_link(&link)?;
        if let Some(existing) = self
            .links
            .values()
            .find(|l| l.kind == link.kind && l.from == link.from && l.to == link.to)
        {
            return Err(ModelError::DuplicateLink { link: link.id, existing: existing.id.clone() });
        }
        if link.kind == LinkKind::Supports {
            if let Some(mut path) = self.supports_path(&link.to, &link.from) {
                path.push(link.to.clone());
                return Err(ModelError::CycleIntroduced { path });
            }
        }
        self.links.insert(link.id.clone(), link);
        Ok(())
    }

    fn check_link(&self, link: &Link) -> Result<(), ModelError> {
        let dangling = |endpoint: &Id| ModelError::DanglingEndpoint { link: link.id.clone(), endpoint: endpoint.clone() };
        let from = self.elements.get(&link.from).ok_or_else(|| dangling(&link.from))?;
        if link.qualifier.is_some() && link.kind != LinkKind::Supports {
            return Err(ModelError::QualifierNotPermitted { link: link.id.clone() });
        }
        let incompatible = |to: String| ModelError::IncompatibleKinds {
            link: link.id.clone(),
            kind: link.kind,
            from: from.kind.to_string(),
            to,
        };
        if link.kind == LinkKind::Warrants {
            let target = match (self.links.get(&link.to), self.elements.get(&link.to)) {
                (Some(t), _) => t,
                (None, Some(e)) => return Err(incompatible(e.kind.to_string())),
                (None, None) => return Err(dangling(&link.to)),
            };
            let source_kind = self.elements.get(&target.from).map(|e| e.kind);
            let ok = from.kind == ElementKind::Warrant
                && target.kind == LinkKind::Supports
                && source_kind == Some(ElementKind::EvidentialClaim);
            if !ok {
                let src = source_kind.map_or_else(|| "?".to_string(), |k| k.to_string());
                return Err(incompatible(format!("a {} link from {src}", target.kind)));
            }
            return Ok(());
        }
        let to = self.elements.get(&link.to).ok_or_else(|| dangling(&link.to))?;
        if kinds_compatible(from.kind, link.kind, to.kind) {
            Ok(())
        } else {
            Err(incompatible(to.kind.to_string()))
        }
    }

    /// A supports path `start -> ... -> end`, if one exists.
    pub(crate) fn supports_path(&self, start: &Id, end: &Id) -> Option<Vec<Id>> {
        let mut stack = vec![(start.clone(), vec![start.clone()])];
        let mut seen = BTreeSet::new();
        while let Some((node, path)) = stack.pop() {
            if &node == end {
                return Some(path);
            }
            if !seen.insert(node.clone()) {
                continue;
            }
            // reverse so that lower link ids are explored first
            let mut next: Vec<&Link> =
                self.links_from(node.as_str()).filter(|l| l.kind == LinkKind::Supports).collect();
            next.reverse();
            for l in next {
                let mut p = path.clone();
                p.push(l.to.clone());
                stack.push((l.to.clone(), p));
            }
        }
        None
    }

    /// Elements in an order where every supports source precedes its target.
    pub fn supports_order(&self) -> Result<Vec<Id>, Vec<Id>> {
        let mut indegree: BTreeMap<&Id, usize> = self.elements.keys().map(|k| (k, 0)).collect();
        for l in self.links.values().filter(|l| l.kind == LinkKind::Supports) {
            *indegree.get_mut(&l.to).expect("endpoints exist") += 1;
        }
        let mut ready: BTreeSet<&Id> = indegree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
        let mut order = Vec::with_capacity(self.elements.len());
        while let Some(next) = ready.pop_first() {
            order.push(next.clone());
            for l in self.links_from(next.as_str()).filter(|l| l.kind == LinkKind::Supports) {
                let d = indegree.get_mut(&l.to).expect("endpoints exist");
                *d -= 1;
                if *d == 0 {
                    ready.insert(&l.to);
                }
            }
        }
        if order.len() == self.elements.len() {
            Ok(order)
        } else {
            let stuck: Vec<Id> = indegree.into_iter().filter(|(_, d)| *d > 0).map(|(k, _)| k.clone()).collect();
            Err(stuck)
        }
    }

    pub fn add_element(&self, element: Element) -> Result<Fragment, ModelError> {
        let mut next = self.clone();
        next.insert_element(element, |_| false)?;
        Ok(next)
    }

    pub fn add_link(&self, link: Link) -> Result<Fragment, ModelError> {
        let mut next = self.clone();
        next.insert_link(link, |_| false)?;
        Ok(next)
    }
}

/// Whether `from --kind--> to` is allowed between two elements. `warrants`
/// targets links and is never allowed between elements.
pub fn kinds_compatible(from: ElementKind, kind: LinkKind, to: ElementKind) -> bool {
    use ElementKind::*;
    match kind {
        LinkKind::Supports => matches!(from, PropertyClaim | EvidentialClaim | Goal) && matches!(to, PropertyClaim | Goal),
        LinkKind::ContextOf => match from {
            Context => matches!(to, Goal | PropertyClaim),
            Assumption => matches!(to, Goal | PropertyClaim | EvidentialClaim),
            _ => false,
        },
        LinkKind::Evidences => from == Evidence && to == EvidentialClaim,
        LinkKind::Warrants => false,
    }
}

/// A named, versioned argument graph plus the challenges and appraisals
/// recorded against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    id: Id,
    title: String,
    phase: Phase,
    graph: Fragment,
    challenges: BTreeMap<Id, Challenge>,
    appraisals: BTreeMap<Id, AppraisalRecord>,
    created: Option<Timestamp>,
    modified: Option<Timestamp>,
}

impl Case {
    pub fn new(id: Id, title: impl Into<String>, phase: Phase) -> Result<Self, ModelError> {
        let title = title.into();
        if !is_valid_text(&title) {
            return Err(ModelError::InvalidTitle);
        }
        Ok(Case {
            id,
            title,
            phase,
            graph: Fragment::default(),
            challenges: BTreeMap::new(),
            appraisals: BTreeMap::new(),
            created: None,
            modified: None,
        })
    }

    pub fn id(&self) -> &Id {
        &self.id
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn created(&self) -> Option<Timestamp> {
        self.created
    }

    pub fn modified(&self) -> Option<Timestamp> {
        self.modified
    }

    pub fn graph(&self) -> &Fragment {
        &self.graph
    }

    pub fn elements(&self) -> &BTreeMap<Id, Element> {
        &self.graph.elements
    }

    pub fn links(&self) -> &BTreeMap<Id, Link> {
        &self.graph.links
    }

    pub fn challenges(&self) -> &BTreeMap<Id, Challenge> {
        &self.challenges
    }

    pub fn appraisals(&self) -> &BTreeMap<Id, AppraisalRecord> {
        &self.appraisals
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.graph.elements.get(id)
    }

    pub fn link(&self, id: &str) -> Option<&Link> {
        self.graph.links.get(id)
    }

    pub fn challenge(&self, id: &str) -> Option<&Challenge> {
        self.challenges.get(id)
    }

    /// Whether `id` names an element, link or challenge.
    pub fn contains_id(&self, id: &str) -> bool {
        self.graph.has_id(id) || self.challenges.contains_key(id)
    }

    pub fn goals(&self) -> impl Iterator<Item = &Element> {
        self.elements().values().filter(|e| e.kind == ElementKind::Goal)
    }

    /// Goals that support nothing further.
    pub fn root_goals(&self) -> impl Iterator<Item = &Element> {
        self.goals().filter(|g| {
            !self
                .graph
                .links_from(g.id.as_str())
                .any(|l| l.kind == LinkKind::Supports)
        })
    }

    pub fn with_phase(&self, phase: Phase) -> Case {
        Case { phase, ..self.clone() }
    }

    pub fn with_title(&self, title: impl Into<String>) -> Result<Case, ModelError> {
        let title = title.into();
        if !is_valid_text(&title) {
            return Err(ModelError::InvalidTitle);
        }
        Ok(Case { title, ..self.clone() })
    }

    pub fn with_id(&self, id: Id) -> Case {
        Case { id, ..self.clone() }
    }

    pub fn with_timestamps(&self, created: Option<Timestamp>, modified: Option<Timestamp>) -> Case {
        Case { created, modified, ..self.clone() }
    }

    pub fn add_element(&self, element: Element) -> Result<Case, ModelError> {
        let mut next = self.clone();
        next.push_element(element)?;
        Ok(next)
    }

    pub fn add_link(&self, link: Link) -> Result<Case, ModelError> {
        let mut next = self.clone();
        next.push_link(link)?;
        Ok(next)
    }

    pub(crate) fn push_element(&mut self, element: Element) -> Result<(), ModelError> {
        let challenges = &self.challenges;
        self.graph.insert_element(element, |id| challenges.contains_key(id))
    }

    pub(crate) fn push_link(&mut self, link: Link) -> Result<(), ModelError> {
        let challenges = &self.challenges;
        self.graph.insert_link(link, |id| challenges.contains_key(id))
    }

    /// Records a new, open challenge.
    pub fn attach_challenge(&self, challenge: Challenge) -> Result<Case, ModelError> {
        if challenge.state != ChallengeState::Open {
            return Err(ModelError::ChallengeNotOpen { id: challenge.id });
        }
        let mut next = self.clone();
        next.push_challenge(challenge)?;
        Ok(next)
    }

    /// Records a challenge in any state; closed states need their note.
    pub(crate) fn push_challenge(&mut self, challenge: Challenge) -> Result<(), ModelError> {
        if self.contains_id(challenge.id.as_str()) {
            return Err(ModelError::DuplicateId(challenge.id));
        }
        if !self.graph.has_id(challenge.target.as_str()) {
            return Err(ModelError::DanglingTarget { challenge: challenge.id, target: challenge.target });
        }
        for (field, value) in [("author", &challenge.author), ("text", &challenge.text)] {
            if !is_valid_text(value) {
                return Err(ModelError::InvalidChallengeText { id: challenge.id, field });
            }
        }
        check_note(&challenge.id, challenge.state, challenge.resolution_note.as_deref())?;
        self.challenges.insert(challenge.id.clone(), challenge);
        Ok(())
    }

    /// Closes an open challenge. A sustained challenge defeats its target.
    pub fn resolve_challenge(&self, id: &str, outcome: Outcome, note: &str) -> Result<Case, ModelError> {
        let current = self
            .challenges
            .get(id)
            .ok_or_else(|| ModelError::NotFound(Id::new(id).unwrap_or_else(|_| self.id.clone())))?;
        if current.state != ChallengeState::Open {
            return Err(ModelError::AlreadyClosed { id: current.id.clone(), state: current.state });
        }
        let state = ChallengeState::from(outcome);
        let note = Some(note.to_string()).filter(|n| !n.trim().is_empty());
        check_note(&current.id, state, note.as_deref())?;
        let mut next = self.clone();
        let c = next.challenges.get_mut(id).expect("checked above");
        c.state = state;
        c.resolution_note = note;
        Ok(next)
    }

    pub(crate) fn put_appraisal(&mut self, record: AppraisalRecord) -> Option<AppraisalRecord> {
        self.appraisals.insert(record.evidence.clone(), record)
    }

    /// Removes an element together with everything that refers to it.
    pub fn remove_element(&self, id: &str) -> Result<Case, ModelError> {
        if !self.graph.elements.contains_key(id) {
            return Err(ModelError::NotFound(self.id_or_case(id)));
        }
        let mut keep: BTreeSet<Id> = self.graph.elements.keys().cloned().collect();
        keep.remove(id);
        Ok(self.restrict(&keep))
    }

    /// Removes a link, the warrants attached to it and challenges on either.
    pub fn remove_link(&self, id: &str) -> Result<Case, ModelError> {
        if !self.graph.links.contains_key(id) {
            return Err(ModelError::NotFound(self.id_or_case(id)));
        }
        let mut next = self.clone();
        let mut doomed: BTreeSet<Id> = BTreeSet::new();
        doomed.insert(Id::new(id).expect("existing id"));
        doomed.extend(self.graph.links_into(id).map(|l| l.id.clone()));
        next.graph.links.retain(|k, _| !doomed.contains(k));
        next.challenges.retain(|_, c| !doomed.contains(&c.target));
        Ok(next)
    }

    fn id_or_case(&self, id: &str) -> Id {
        Id::new(id).unwrap_or_else(|_| self.id.clone())
    }

    /// The sub-case induced by `visible` elements: links need both ends,
    /// warrants need their target link, challenges and appraisals need their
    /// subject.
    pub fn restrict(&self, visible: &BTreeSet<Id>) -> Case {
        let mut next = self.clone();
        next.graph.elements.retain(|k, _| visible.contains(k));
        let elements = &next.graph.elements;
        next.graph
            .links
            .retain(|_, l| l.kind == LinkKind::Warrants || (elements.contains_key(&l.from) && elements.contains_key(&l.to)));
        let kept_links: BTreeSet<Id> = next.graph.links.keys().cloned().collect();
        next.graph.links.retain(|_, l| {
            l.kind != LinkKind::Warrants || (elements.contains_key(&l.from) && kept_links.contains(&l.to))
        });
        let graph = &next.graph;
        next.challenges.retain(|_, c| graph.has_id(c.target.as_str()));
        next.appraisals.retain(|k, _| graph.elements.contains_key(k));
        next
    }

    /// Adds every element and link of `fragment`, checking each as
    /// [`Case::add_element`] and [`Case::add_link`] would.
    pub fn merge(&self, fragment: &Fragment) -> Result<Case, ModelError> {
        let mut next = self.clone();
        for e in fragment.elements.values() {
            next.push_element(e.clone())?;
        }
        let (warrants, others): (Vec<&Link>, Vec<&Link>) =
            fragment.links.values().partition(|l| l.kind == LinkKind::Warrants);
        for l in others.into_iter().chain(warrants) {
            next.push_link(l.clone())?;
        }
        Ok(next)
    }

    /// The element a link belongs to for status purposes: its target, or for
    /// a warrants link the target of the warranted link.
    pub fn link_owner<'a>(&'a self, link: &'a Link) -> Option<&'a Id> {
        match link.kind {
            LinkKind::Warrants => self.link(link.to.as_str()).map(|l| &l.to),
            _ => Some(&link.to),
        }
    }
}

fn check_note(id: &Id, state: ChallengeState, note: Option<&str>) -> Result<(), ModelError> {
    match note {
        None if state.requires_note() => Err(ModelError::NoteRequired { id: id.clone(), state }),
        Some(n) if !is_valid_text(n) => Err(ModelError::InvalidChallengeText { id: id.clone(), field: "note" }),
        _ => Ok(()),
    }
}
