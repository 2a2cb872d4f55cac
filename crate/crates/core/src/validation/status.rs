use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::keyword::keyword_enum;
use crate::model::{Case, ChallengeState, ElementKind, LinkKind};
use crate::Id;

keyword_enum! {
    /// Defeasible standing of an element, weakest first.
    pub enum Status {
        Defeated => "Defeated",
        Contested => "Contested",
        Undeveloped => "Undeveloped",
        Assumed => "Assumed",
        Supported => "Supported",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatusError {
    #[error("supports cycle through {}", .0.iter().map(Id::as_str).collect::<Vec<_>>().join(", "))]
    CycleDetected(Vec<Id>),
    #[error("`{0}` not found")]
    NotFound(String),
}

/// The rule that fixed an element's status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    NoSupport,
    Given,
    Assumed,
    EvidenceLeaf,
    WarrantLeaf,
    WeakestChild { child: Id, link: Id },
    WeakestWarrant { warrant: Id, link: Id },
    CoveredByAssumption { assumption: Id },
    MissingWarrant { link: Id },
    OpenChallenge { challenge: Id },
    SustainedChallenge { challenge: Id },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::NoSupport => f.write_str("no support"),
            Rule::Given => f.write_str("context is taken as given"),
            Rule::Assumed => f.write_str("assumption"),
            Rule::EvidenceLeaf => f.write_str("evidence artefact"),
            Rule::WarrantLeaf => f.write_str("warrant"),
            Rule::WeakestChild { child, link } => write!(f, "weakest support is `{child}` via `{link}`"),
            Rule::WeakestWarrant { warrant, link } => write!(f, "weakest warrant is `{warrant}` on `{link}`"),
            Rule::CoveredByAssumption { assumption } => write!(f, "covered by assumption `{assumption}`"),
            Rule::MissingWarrant { link } => write!(f, "supports link `{link}` has no warrant"),
            Rule::OpenChallenge { challenge } => write!(f, "open challenge `{challenge}`"),
            Rule::SustainedChallenge { challenge } => write!(f, "sustained challenge `{challenge}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Eval {
    status: Status,
    rule: Rule,
}

/// Status of every element.
///
/// Leaves: evidence and warrants are Supported, assumptions and contexts
/// Assumed. An evidential claim takes the weakest of its evidence; a property
/// claim or goal takes the weakest of its supporting children and of the
/// warrants on those supports, capped at Undeveloped when a supports link
/// from an evidential claim carries no warrant. A node with nothing beneath
/// it is Assumed when an assumption is attached to it, otherwise Undeveloped.
/// Open challenges on the node, or on a link into it, cap it at Contested;
/// sustained ones at Defeated.
pub fn compute_status(case: &Case) -> Result<BTreeMap<Id, Status>, StatusError> {
    Ok(evaluate(case)?.into_iter().map(|(k, v)| (k, v.status)).collect())
}

fn evaluate(case: &Case) -> Result<BTreeMap<Id, Eval>, StatusError> {
    let order = case.graph().supports_order().map_err(StatusError::CycleDetected)?;
    let caps = challenge_caps(case);
    let mut evals: BTreeMap<Id, Eval> = BTreeMap::new();

    // leaf kinds first: evidential claims and above read them
    let (leaves, inner): (Vec<Id>, Vec<Id>) = order.into_iter().partition(|id| {
        !matches!(
            case.elements()[id].kind,
            ElementKind::EvidentialClaim | ElementKind::PropertyClaim | ElementKind::Goal
        )
    });
    for id in leaves.into_iter().chain(inner) {
        let element = &case.elements()[&id];
        let mut candidates: Vec<(Status, Rule)> = caps.get(&id).cloned().unwrap_or_default();
        let base = match element.kind {
            ElementKind::Context => (Status::Assumed, Rule::Given),
            ElementKind::Assumption => (Status::Assumed, Rule::Assumed),
            ElementKind::Evidence => (Status::Supported, Rule::EvidenceLeaf),
            ElementKind::Warrant => (Status::Supported, Rule::WarrantLeaf),
            ElementKind::EvidentialClaim => {
                let children: Vec<(Status, Rule)> = case
                    .graph()
                    .links_into(id.as_str())
                    .filter(|l| l.kind == LinkKind::Evidences)
                    .map(|l| (evals[&l.from].status, Rule::WeakestChild { child: l.from.clone(), link: l.id.clone() }))
                    .collect();
                weakest(children).unwrap_or_else(|| covered(case, &id, &evals))
            }
            ElementKind::PropertyClaim | ElementKind::Goal => {
                let mut children = Vec::new();
                for l in case.graph().links_into(id.as_str()).filter(|l| l.kind == LinkKind::Supports) {
                    children.push((evals[&l.from].status, Rule::WeakestChild { child: l.from.clone(), link: l.id.clone() }));
                    let mut warranted = false;
                    for w in case.graph().links_into(l.id.as_str()) {
                        warranted = true;
                        children.push((
                            evals[&w.from].status,
                            Rule::WeakestWarrant { warrant: w.from.clone(), link: l.id.clone() },
                        ));
                    }
                    let from_kind = case.elements()[&l.from].kind;
                    if from_kind == ElementKind::EvidentialClaim && !warranted {
                        candidates.push((Status::Undeveloped, Rule::MissingWarrant { link: l.id.clone() }));
                    }
                }
                weakest(children).unwrap_or_else(|| covered(case, &id, &evals))
            }
        };
        candidates.push(base);
        let (status, rule) = weakest(candidates).expect("base candidate present");
        evals.insert(id, Eval { status, rule });
    }
    Ok(evals)
}

/// First candidate with the minimum status.
fn weakest(candidates: Vec<(Status, Rule)>) -> Option<(Status, Rule)> {
    let mut best: Option<(Status, Rule)> = None;
    for c in candidates {
        if best.as_ref().is_none_or(|b| c.0 < b.0) {
            best = Some(c);
        }
    }
    best
}

fn covered(case: &Case, id: &Id, evals: &BTreeMap<Id, Eval>) -> (Status, Rule) {
    let assumptions: Vec<(Status, Rule)> = case
        .graph()
        .links_into(id.as_str())
        .filter(|l| l.kind == LinkKind::ContextOf && case.elements()[&l.from].kind == ElementKind::Assumption)
        .map(|l| (evals[&l.from].status, Rule::CoveredByAssumption { assumption: l.from.clone() }))
        .collect();
    weakest(assumptions).unwrap_or((Status::Undeveloped, Rule::NoSupport))
}

/// Per element, the caps imposed by open and sustained challenges on the
/// element itself or on links owned by it. Sustained caps sort first so they
/// win ties in rule attribution.
fn challenge_caps(case: &Case) -> BTreeMap<Id, Vec<(Status, Rule)>> {
    let mut caps: BTreeMap<Id, Vec<(Status, Rule)>> = BTreeMap::new();
    for c in case.challenges().values() {
        let cap = match c.state {
            ChallengeState::Open => (Status::Contested, Rule::OpenChallenge { challenge: c.id.clone() }),
            ChallengeState::Sustained => (Status::Defeated, Rule::SustainedChallenge { challenge: c.id.clone() }),
            ChallengeState::Withdrawn | ChallengeState::Resolved => continue,
        };
        let owner = match case.link(c.target.as_str()) {
            Some(link) => case.link_owner(link).cloned(),
            None => Some(c.target.clone()),
        };
        if let Some(owner) = owner {
            caps.entry(owner).or_default().push(cap);
        }
    }
    for v in caps.values_mut() {
        v.sort_by_key(|a| a.0);
    }
    caps
}

/// One node of a status explanation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub element: Id,
    pub status: Status,
    pub rule: Rule,
    pub children: Vec<Explanation>,
}

impl Explanation {
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Explanation::depth).max().unwrap_or(0)
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("{} {}: {}\n", self.element, self.status, self.rule));
        for c in &self.children {
            c.render_into(out, depth + 1);
        }
    }
}

/// The status of `id` together with the statuses it was derived from.
pub fn explain_status(case: &Case, id: &str) -> Result<Explanation, StatusError> {
    if case.element(id).is_none() {
        return Err(StatusError::NotFound(id.to_string()));
    }
    let evals = evaluate(case)?;
    Ok(explain_node(case, &evals, case.element(id).map(|e| &e.id).expect("checked")))
}

fn explain_node(case: &Case, evals: &BTreeMap<Id, Eval>, id: &Id) -> Explanation {
    let eval = &evals[id];
    let element = &case.elements()[id];
    let mut children = Vec::new();
    let mut has_support = false;
    let wanted = match element.kind {
        ElementKind::EvidentialClaim => Some(LinkKind::Evidences),
        ElementKind::PropertyClaim | ElementKind::Goal => Some(LinkKind::Supports),
        _ => None,
    };
    if let Some(kind) = wanted {
        for l in case.graph().links_into(id.as_str()).filter(|l| l.kind == kind) {
            has_support = true;
            children.push(explain_node(case, evals, &l.from));
            for w in case.graph().links_into(l.id.as_str()) {
                children.push(explain_node(case, evals, &w.from));
            }
        }
        if !has_support {
            for l in case.graph().links_into(id.as_str()).filter(|l| {
                l.kind == LinkKind::ContextOf && case.elements()[&l.from].kind == ElementKind::Assumption
            }) {
                children.push(explain_node(case, evals, &l.from));
            }
        }
    }
    Explanation { element: id.clone(), status: eval.status, rule: eval.rule.clone(), children }
}
