use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::lifecycle::LifecycleStage;
use crate::model::{AudienceTier, Case, ElementKind, LinkKind};
use crate::Id;

/// Audience tier plus optional goal and stage selections, applied together.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TierFilter {
    pub viewer: AudienceTier,
    pub goals: Option<BTreeSet<Id>>,
    pub stages: Option<BTreeSet<LifecycleStage>>,
}

/// The visible part of a case and what the tier rule withheld from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtered {
    pub case: Case,
    /// Elements selected by the goal and stage filters but above the viewer's tier.
    pub redacted: BTreeSet<Id>,
}

impl TierFilter {
    pub fn new(viewer: AudienceTier) -> Self {
        TierFilter { viewer, goals: None, stages: None }
    }

    /// Everything, at the highest tier.
    pub fn everything() -> Self {
        TierFilter::new(AudienceTier::Auditor)
    }

    pub fn with_goals(mut self, goals: impl IntoIterator<Item = Id>) -> Self {
        self.goals = Some(goals.into_iter().collect());
        self
    }

    pub fn with_stages(mut self, stages: impl IntoIterator<Item = LifecycleStage>) -> Self {
        self.stages = Some(stages.into_iter().collect());
        self
    }

    /// Elements passing the goal and stage selections, ignoring tier.
    pub fn selected(&self, case: &Case) -> BTreeSet<Id> {
        let up = upward_edges(case);
        let mut down: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
        for (from, tos) in &up {
            for to in tos {
                down.entry(*to).or_default().push(*from);
            }
        }
        let all: BTreeSet<Id> = case.elements().keys().cloned().collect();
        let by_goal = match &self.goals {
            None => all.clone(),
            Some(goals) => closure(goals.iter().filter(|g| case.elements().contains_key(*g)), &down),
        };
        let by_stage = match &self.stages {
            None => all,
            Some(stages) => {
                let matching: Vec<&Id> = case
                    .elements()
                    .values()
                    .filter(|e| e.kind == ElementKind::PropertyClaim && e.stage.is_some_and(|s| stages.contains(&s)))
                    .map(|e| &e.id)
                    .collect();
                let near: BTreeSet<Id> =
                    closure(matching.iter().copied(), &up).union(&closure(matching.iter().copied(), &down)).cloned().collect();
                let mut pass: BTreeSet<Id> = case
                    .elements()
                    .values()
                    .filter(|e| e.kind != ElementKind::PropertyClaim && near.contains(&e.id))
                    .map(|e| e.id.clone())
                    .collect();
                pass.extend(matching.into_iter().cloned());
                let attached: Vec<Id> = case
                    .links()
                    .values()
                    .filter(|l| l.kind == LinkKind::ContextOf && pass.contains(&l.to))
                    .map(|l| l.from.clone())
                    .collect();
                pass.extend(attached);
                pass
            }
        };
        by_goal.intersection(&by_stage).cloned().collect()
    }

    pub fn apply(&self, case: &Case) -> Filtered {
        let selected = self.selected(case);
        let (visible, redacted): (BTreeSet<Id>, BTreeSet<Id>) =
            selected.into_iter().partition(|id| case.elements()[id].tier.visible_to(self.viewer));
        Filtered { case: case.restrict(&visible), redacted }
    }
}

/// Justificatory direction: each element to what it supports, contextualises
/// or evidences; a warrant to the element its warranted link supports.
fn upward_edges(case: &Case) -> BTreeMap<&Id, Vec<&Id>> {
    let mut up: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for l in case.links().values() {
        let to = match l.kind {
            LinkKind::Warrants => match case.link_owner(l) {
                Some(owner) => owner,
                None => continue,
            },
            _ => &l.to,
        };
        up.entry(&l.from).or_default().push(to);
    }
    up
}

fn closure<'a>(start: impl Iterator<Item = &'a Id>, edges: &BTreeMap<&'a Id, Vec<&'a Id>>) -> BTreeSet<Id> {
    let mut seen: BTreeSet<Id> = BTreeSet::new();
    let mut queue: VecDeque<&Id> = start.collect();
    while let Some(id) = queue.pop_front() {
        if !seen.insert(id.clone()) {
            continue;
        }
        if let Some(next) = edges.get(id) {
            queue.extend(next.iter().copied());
        }
    }
    seen
}
