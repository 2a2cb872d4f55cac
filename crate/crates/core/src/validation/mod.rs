//! Structural rules for a case at a given phase, and defeasible status.

mod status;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::keyword::keyword_enum;
use crate::model::{Case, ElementKind, LinkKind, Phase};
use crate::Id;

pub use status::{compute_status, explain_status, Explanation, Rule, Status, StatusError};

keyword_enum! {
    pub enum Severity {
        Error => "error",
        Warning => "warning",
    }
}

impl Severity {
    fn prefix(self) -> &'static str {
        match self {
            Severity::Error => "E",
            Severity::Warning => "W",
        }
    }
}

/// Rule groups, named by the code they emit without the severity prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleGroup {
    UnderspecifiedGoal,
    MissingContext,
    NoGoal,
    MissingWarrant,
    Unevidenced,
    Orphan,
    Cycle,
}

impl RuleGroup {
    pub fn name(self) -> &'static str {
        match self {
            RuleGroup::UnderspecifiedGoal => "UNDERSPECIFIED-GOAL",
            RuleGroup::MissingContext => "MISSING-CONTEXT",
            RuleGroup::NoGoal => "NO-GOAL",
            RuleGroup::MissingWarrant => "MISSING-WARRANT",
            RuleGroup::Unevidenced => "UNEVIDENCED",
            RuleGroup::Orphan => "ORPHAN",
            RuleGroup::Cycle => "CYCLE",
        }
    }

    /// Severity at `phase`, or `None` when the rule is not yet applied.
    pub fn severity(self, phase: Phase) -> Option<Severity> {
        use Phase::*;
        use Severity::*;
        match (self, phase) {
            (RuleGroup::UnderspecifiedGoal | RuleGroup::Cycle, _) => Some(Error),
            (RuleGroup::MissingContext | RuleGroup::NoGoal, Preliminary) => None,
            (RuleGroup::MissingContext | RuleGroup::NoGoal, _) => Some(Error),
            (RuleGroup::MissingWarrant, Operational) => Some(Error),
            (RuleGroup::MissingWarrant, _) => Some(Warning),
            (RuleGroup::Unevidenced, Preliminary) => Some(Warning),
            (RuleGroup::Unevidenced, _) => Some(Error),
            (RuleGroup::Orphan, Operational) => Some(Error),
            (RuleGroup::Orphan, _) => Some(Warning),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: String,
    pub target: Id,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: {}", self.severity, self.code, self.target, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub phase: Phase,
    /// Errors before warnings, then by target.
    pub findings: Vec<Finding>,
    pub statuses: BTreeMap<Id, Status>,
}

impl ValidationReport {
    pub fn errors(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Error).count()
    }

    pub fn warnings(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Warning).count()
    }

    pub fn codes(&self) -> BTreeSet<&str> {
        self.findings.iter().map(|f| f.code.as_str()).collect()
    }
}

/// Validates at the case's own phase.
pub fn validate(case: &Case) -> ValidationReport {
    validate_at(case, case.phase())
}

pub fn validate_at(case: &Case, phase: Phase) -> ValidationReport {
    let mut findings = Vec::new();
    let mut emit = |group: RuleGroup, target: &Id, message: String| {
        if let Some(severity) = group.severity(phase) {
            findings.push(Finding {
                code: format!("{}-{}", severity.prefix(), group.name()),
                target: target.clone(),
                severity,
                message,
            });
        }
    };
    let graph = case.graph();
    let from_kind = |id: &Id| case.elements()[id].kind;

    for g in case.goals() {
        match &g.slots {
            Some(slots) if slots.render() == g.text => {}
            Some(_) => emit(
                RuleGroup::UnderspecifiedGoal,
                &g.id,
                "goal text does not state its system, context and goal slots".into(),
            ),
            None => emit(RuleGroup::UnderspecifiedGoal, &g.id, "goal has no system, context and goal slots".into()),
        }
        let has_context = graph
            .links_into(g.id.as_str())
            .any(|l| l.kind == LinkKind::ContextOf && from_kind(&l.from) == ElementKind::Context);
        if !has_context {
            emit(RuleGroup::MissingContext, &g.id, "goal has no supporting context element".into());
        }
    }
    if case.goals().next().is_none() {
        emit(RuleGroup::NoGoal, case.id(), "case has no goal".into());
    }
    for l in case.links().values() {
        if l.kind == LinkKind::Supports
            && from_kind(&l.from) == ElementKind::EvidentialClaim
            && graph.links_into(l.id.as_str()).next().is_none()
        {
            emit(
                RuleGroup::MissingWarrant,
                &l.id,
                format!("supports link from evidential claim `{}` to `{}` has no warrant", l.from, l.to),
            );
        }
    }
    for e in case.elements().values() {
        match e.kind {
            ElementKind::EvidentialClaim => {
                let backed = graph.links_into(e.id.as_str()).any(|l| {
                    l.kind == LinkKind::Evidences
                        || (l.kind == LinkKind::ContextOf && from_kind(&l.from) == ElementKind::Assumption)
                });
                if !backed {
                    emit(RuleGroup::Unevidenced, &e.id, "evidential claim has no evidence and no covering assumption".into());
                }
            }
            ElementKind::PropertyClaim if !reaches_goal(case, &e.id) => {
                emit(RuleGroup::Orphan, &e.id, "property claim does not support any goal".into());
            }
            _ => {}
        }
    }
    let statuses = match compute_status(case) {
        Ok(s) => s,
        Err(StatusError::CycleDetected(ids)) => {
            for id in &ids {
                emit(RuleGroup::Cycle, id, "element lies on a supports cycle".into());
            }
            BTreeMap::new()
        }
        Err(StatusError::NotFound(_)) => unreachable!("compute_status looks up no caller id"),
    };
    findings.sort_by(|a, b| (a.severity, &a.target, &a.code).cmp(&(b.severity, &b.target, &b.code)));
    ValidationReport { phase, findings, statuses }
}

fn reaches_goal(case: &Case, start: &Id) -> bool {
    let mut stack = vec![start];
    let mut seen = BTreeSet::new();
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        for l in case.graph().links_from(id.as_str()).filter(|l| l.kind == LinkKind::Supports) {
            if case.elements()[&l.to].kind == ElementKind::Goal {
                return true;
            }
            stack.push(&l.to);
        }
    }
    false
}
