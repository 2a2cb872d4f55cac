//! Reference evaluators written straight from the rule tables. They recurse
//! over the raw element and link lists with no ordering, caching or shared
//! code with the library, so agreement is meaningful.

use std::collections::BTreeMap;

use eac_core::appraisal::{Admissibility, Materiality, Relevance};
use eac_core::model::{Case, ChallengeState, ElementKind, Link, LinkKind};
use eac_core::validation::Status;
use eac_core::Id;

fn into<'a>(case: &'a Case, target: &'a str, kind: LinkKind) -> impl Iterator<Item = &'a Link> + 'a {
    case.links().values().filter(move |l| l.kind == kind && l.to.as_str() == target)
}

fn weakest(parts: impl IntoIterator<Item = Status>) -> Option<Status> {
    parts.into_iter().min()
}

/// Element a challenge on `target` lands on: the element itself, the target
/// of a challenged link, or for a warrants link the target of the link it
/// warrants.
fn landing(case: &Case, target: &Id) -> Option<Id> {
    if case.elements().contains_key(target) {
        return Some(target.clone());
    }
    let link = case.links().get(target)?;
    if link.kind == LinkKind::Warrants {
        return case.links().get(&link.to).map(|l| l.to.clone());
    }
    Some(link.to.clone())
}

/// Status of one element, recomputed from scratch.
///
/// | kind | base |
/// |---|---|
/// | Context, Assumption | Assumed |
/// | Evidence, Warrant | Supported |
/// | EvidentialClaim | min over evidences sources |
/// | PropertyClaim, Goal | min over supports sources and their warrants; Undeveloped if an evidential support is unwarranted |
/// | claim or goal with no sources | min over attached assumptions, else Undeveloped |
///
/// Then: open challenge on the element or a link landing on it caps at
/// Contested, sustained at Defeated, withdrawn and resolved do nothing.
pub fn status_of(case: &Case, id: &Id) -> Status {
    let e = &case.elements()[id];
    let base = match e.kind {
        ElementKind::Context | ElementKind::Assumption => Status::Assumed,
        ElementKind::Evidence | ElementKind::Warrant => Status::Supported,
        ElementKind::EvidentialClaim => weakest(into(case, id.as_str(), LinkKind::Evidences).map(|l| status_of(case, &l.from)))
            .unwrap_or_else(|| assumed_or_undeveloped(case, id)),
        ElementKind::PropertyClaim | ElementKind::Goal => {
            let supports: Vec<&Link> = into(case, id.as_str(), LinkKind::Supports).collect();
            if supports.is_empty() {
                assumed_or_undeveloped(case, id)
            } else {
                let mut parts = Vec::new();
                for s in supports {
                    parts.push(status_of(case, &s.from));
                    let warrants: Vec<&Link> = into(case, s.id.as_str(), LinkKind::Warrants).collect();
                    if warrants.is_empty() && case.elements()[&s.from].kind == ElementKind::EvidentialClaim {
                        parts.push(Status::Undeveloped);
                    }
                    parts.extend(warrants.iter().map(|w| status_of(case, &w.from)));
                }
                weakest(parts).unwrap()
            }
        }
    };
    let mut status = base;
    for c in case.challenges().values() {
        if landing(case, &c.target).as_ref() != Some(id) {
            continue;
        }
        let cap = match c.state {
            ChallengeState::Open => Status::Contested,
            ChallengeState::Sustained => Status::Defeated,
            ChallengeState::Withdrawn | ChallengeState::Resolved => continue,
        };
        status = status.min(cap);
    }
    status
}

fn assumed_or_undeveloped(case: &Case, id: &Id) -> Status {
    weakest(
        into(case, id.as_str(), LinkKind::ContextOf)
            .filter(|l| case.elements()[&l.from].kind == ElementKind::Assumption)
            .map(|l| status_of(case, &l.from)),
    )
    .unwrap_or(Status::Undeveloped)
}

pub fn statuses(case: &Case) -> BTreeMap<Id, Status> {
    case.elements().keys().map(|id| (id.clone(), status_of(case, id))).collect()
}

/// Value of an evidence element: zero when defeated or when any triad
/// verdict is negative, the probative value otherwise, `None` if unappraised.
fn evidence_value(case: &Case, id: &Id) -> Option<f64> {
    if status_of(case, id) == Status::Defeated {
        return Some(0.0);
    }
    let rec = case.appraisals().get(id)?;
    let ok = rec.relevance.verdict == Relevance::Relevant
        && rec.materiality.verdict == Materiality::Material
        && rec.admissibility.verdict == Admissibility::Admissible;
    Some(if ok { rec.probative_value.get() } else { 0.0 })
}

/// Value where a downward supports path stops: a defeated node is zero, an
/// evidential claim takes its best evidence (unassessed if any alternative
/// is), and a claim with no supports is unassessed.
fn path_end(case: &Case, id: &Id) -> Option<f64> {
    if status_of(case, id) == Status::Defeated {
        return Some(0.0);
    }
    match case.elements()[id].kind {
        ElementKind::EvidentialClaim => {
            let alts: Vec<Option<f64>> =
                into(case, id.as_str(), LinkKind::Evidences).map(|l| evidence_value(case, &l.from)).collect();
            if alts.is_empty() || alts.iter().any(Option::is_none) {
                return None;
            }
            alts.into_iter().flatten().reduce(f64::max)
        }
        _ => None,
    }
}

/// Every supports path from `id` down to where it stops.
pub fn paths_below(case: &Case, id: &Id) -> Vec<Vec<Id>> {
    let kind = case.elements()[id].kind;
    let below: Vec<&Link> = into(case, id.as_str(), LinkKind::Supports).collect();
    let stops = status_of(case, id) == Status::Defeated
        || kind == ElementKind::EvidentialClaim
        || below.is_empty();
    if stops {
        return vec![vec![id.clone()]];
    }
    let mut out = Vec::new();
    for l in below {
        for mut p in paths_below(case, &l.from) {
            p.insert(0, id.clone());
            out.push(p);
        }
    }
    out
}

/// Minimum over every path of the value where that path stops; unassessed
/// if any path stops somewhere unassessed.
pub fn claim_value(case: &Case, id: &Id) -> Option<f64> {
    let mut acc: Option<f64> = None;
    for p in paths_below(case, id) {
        let v = path_end(case, p.last().unwrap())?;
        acc = Some(acc.map_or(v, |a: f64| a.min(v)));
    }
    acc
}

/// Minimum over every path from any top goal.
pub fn case_value(case: &Case) -> Option<f64> {
    let tops: Vec<&Id> = case
        .elements()
        .values()
        .filter(|e| e.kind == ElementKind::Goal)
        .filter(|g| !case.links().values().any(|l| l.kind == LinkKind::Supports && l.from == g.id))
        .map(|g| &g.id)
        .collect();
    let mut acc: Option<f64> = None;
    for g in tops {
        let v = claim_value(case, g)?;
        acc = Some(acc.map_or(v, |a: f64| a.min(v)));
    }
    acc
}
