use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::dot::redaction_label;
use super::filter::TierFilter;
use crate::appraisal::{sufficiency, Assessment, SufficiencyReport, DEFAULT_THRESHOLD};
use crate::lifecycle::{coverage, LifecycleStage};
use crate::model::{Case, Element, ElementKind, LinkKind};
use crate::validation::{compute_status, Status};
use crate::Id;

const WITHHELD: &str = "withheld";

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

fn goal_statement(g: &Element) -> String {
    match &g.slots {
        Some(s) if s.render() == g.text => format!(
            "The use of the **{}** by **{}** can help advance **{}**.",
            s.system(),
            s.context(),
            s.goal()
        ),
        _ => g.text.clone(),
    }
}

fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.2}"),
        None => "unassessed".to_string(),
    }
}

fn fmt_assessment(a: &Assessment) -> String {
    match a.value {
        Some(v) => format!("{v:.2} ({})", a.verdict),
        None => a.verdict.to_string(),
    }
}

/// Elements whose sufficiency depends on a redacted element.
fn tainted(case: &Case, redacted: &BTreeSet<Id>) -> BTreeSet<Id> {
    let mut out: BTreeSet<Id> = redacted.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for l in case.links().values() {
            if matches!(l.kind, LinkKind::Supports | LinkKind::Evidences) && out.contains(&l.from) && !out.contains(&l.to) {
                out.insert(l.to.clone());
                changed = true;
            }
        }
    }
    out
}

pub fn to_report(case: &Case, filter: &TierFilter) -> String {
    to_report_with(case, filter, DEFAULT_THRESHOLD)
}

/// Markdown report of the part of `case` visible under `filter`. Statuses and
/// sufficiency are computed on the whole case; values that depend on
/// redacted evidence are shown as withheld.
pub fn to_report_with(case: &Case, filter: &TierFilter, threshold: f64) -> String {
    let filtered = filter.apply(case);
    let visible = &filtered.case;
    let statuses: BTreeMap<Id, Status> = compute_status(case).unwrap_or_default();
    let suff: Option<SufficiencyReport> = sufficiency(case, threshold).ok();
    let hidden = tainted(case, &filtered.redacted);
    let status_of = |id: &Id| statuses.get(id).map_or("n/a".to_string(), ToString::to_string);
    let suff_of = |id: &Id| {
        if hidden.contains(id) {
            return WITHHELD.to_string();
        }
        match &suff {
            Some(r) => r.per_claim.get(id).map_or("n/a".to_string(), fmt_assessment),
            None => "n/a".to_string(),
        }
    };

    let mut out = String::new();
    writeln!(out, "# {}\n", visible.title()).unwrap();
    writeln!(out, "Case `{}`, phase {}, viewed at tier {}.\n", visible.id(), visible.phase(), filter.viewer).unwrap();

    writeln!(out, "## Goals\n").unwrap();
    let goals: Vec<&Element> = visible.goals().collect();
    if goals.is_empty() {
        writeln!(out, "No goals visible.").unwrap();
    }
    for g in &goals {
        writeln!(out, "- `{}` ({}, sufficiency {}): {}", g.id, status_of(&g.id), suff_of(&g.id), goal_statement(g)).unwrap();
    }
    if let (Some(r), true) = (&suff, hidden.is_disjoint(&case.root_goals().map(|g| g.id.clone()).collect())) {
        writeln!(out, "\nCase sufficiency at threshold {:.2}: {}.", r.threshold, fmt_assessment(&r.case_value)).unwrap();
    } else if suff.is_some() {
        writeln!(out, "\nCase sufficiency at threshold {threshold:.2}: {WITHHELD}.").unwrap();
    }

    writeln!(out, "\n## Claims by lifecycle stage").unwrap();
    let mut by_stage: BTreeMap<Option<LifecycleStage>, Vec<&Element>> = BTreeMap::new();
    for e in visible.elements().values() {
        if matches!(e.kind, ElementKind::PropertyClaim | ElementKind::EvidentialClaim) {
            by_stage.entry(e.stage).or_default().push(e);
        }
    }
    if by_stage.is_empty() {
        writeln!(out, "\nNo claims visible.").unwrap();
    }
    let untagged = by_stage.remove(&None);
    let groups = by_stage
        .into_iter()
        .map(|(s, v)| {
            let s = s.expect("tagged");
            (format!("{s} ({})", s.macro_stage()), v)
        })
        .chain(untagged.map(|v| ("untagged".to_string(), v)));
    for (heading, claims) in groups {
        writeln!(out, "\n### {heading}\n").unwrap();
        writeln!(out, "| Claim | Kind | Scope | Text | Status | Sufficiency |").unwrap();
        writeln!(out, "|---|---|---|---|---|---|").unwrap();
        for e in claims {
            let scope = e.scope.map_or("-".to_string(), |s| s.to_string());
            writeln!(
                out,
                "| `{}` | {} | {} | {} | {} | {} |",
                e.id,
                e.kind,
                scope,
                cell(&e.text),
                status_of(&e.id),
                suff_of(&e.id)
            )
            .unwrap();
        }
    }

    writeln!(out, "\n## Lifecycle coverage\n").unwrap();
    let cov = coverage(visible);
    writeln!(out, "{} of {} stages covered.\n", cov.covered(), LifecycleStage::ALL.len()).unwrap();
    writeln!(out, "| Stage | Macro stage | Property claims |").unwrap();
    writeln!(out, "|---|---|---|").unwrap();
    for s in LifecycleStage::ALL {
        writeln!(out, "| {s} | {} | {} |", s.macro_stage(), cov.counts[s]).unwrap();
    }
    if !cov.untagged.is_empty() {
        writeln!(out, "\nUntagged property claims: {}.", cov.untagged.len()).unwrap();
    }

    writeln!(out, "\n## Evidence\n").unwrap();
    let evidence: Vec<&Element> = visible.elements().values().filter(|e| e.kind == ElementKind::Evidence).collect();
    if evidence.is_empty() {
        writeln!(out, "No evidence visible.").unwrap();
    } else {
        writeln!(out, "| Evidence | Locator | Text | Effective value |").unwrap();
        writeln!(out, "|---|---|---|---|").unwrap();
        for e in evidence {
            let value = suff.as_ref().and_then(|r| r.per_evidence.get(&e.id).copied()).map_or("n/a".into(), fmt_value);
            let loc = e.locator.as_ref().map_or(String::new(), ToString::to_string);
            writeln!(out, "| `{}` | {} | {} | {} |", e.id, cell(&loc), cell(&e.text), value).unwrap();
        }
    }

    writeln!(out, "\n## Challenge log\n").unwrap();
    if visible.challenges().is_empty() {
        writeln!(out, "No challenges.").unwrap();
    } else {
        writeln!(out, "| Challenge | Target | Author | State | Objection | Resolution |").unwrap();
        writeln!(out, "|---|---|---|---|---|---|").unwrap();
        for c in visible.challenges().values() {
            writeln!(
                out,
                "| `{}` | `{}` | {} | {} | {} | {} |",
                c.id,
                c.target,
                cell(&c.author),
                c.state,
                cell(&c.text),
                cell(c.resolution_note.as_deref().unwrap_or("-"))
            )
            .unwrap();
        }
    }

    writeln!(out, "\n## Redactions\n").unwrap();
    if filtered.redacted.is_empty() {
        writeln!(out, "None at tier {}.", filter.viewer).unwrap();
    } else {
        writeln!(out, "{} at tier {}.\n", redaction_label(filtered.redacted.len()), filter.viewer).unwrap();
        for id in &filtered.redacted {
            let e = &case.elements()[id];
            writeln!(out, "- `{id}` ({}) is withheld; it requires tier {}.", e.kind, e.tier).unwrap();
        }
    }
    out
}
