use std::fmt::Write as _;

use super::lexer::quote;
use super::parser::element_kind_keyword;
use crate::appraisal::{AppraisalRecord, Assessed};
use crate::model::{AudienceTier, Case, Challenge, ChallengeState, Element, ElementKind, Link};

/// Canonical `.eac` text: header, then elements, links, appraisals and
/// challenges, each group in id order and indented two spaces.
pub fn serialize(case: &Case) -> String {
    let mut out = String::new();
    write!(out, "case {} phase {} id {}", quote(case.title()), case.phase(), case.id()).unwrap();
    if let Some(t) = case.created() {
        write!(out, " created {t}").unwrap();
    }
    if let Some(t) = case.modified() {
        write!(out, " modified {t}").unwrap();
    }
    out.push('\n');
    body(&mut out, case.elements().values(), case.links().values());
    for a in case.appraisals().values() {
        writeln!(out, "  {}", appraisal_line(a)).unwrap();
    }
    for c in case.challenges().values() {
        writeln!(out, "  {}", challenge_line(c)).unwrap();
    }
    out
}

pub(crate) fn body<'a>(
    out: &mut String,
    elements: impl Iterator<Item = &'a Element>,
    links: impl Iterator<Item = &'a Link>,
) {
    for e in elements {
        writeln!(out, "  {}", element_line(e)).unwrap();
    }
    for l in links {
        writeln!(out, "  {}", link_line(l)).unwrap();
    }
}

pub fn element_line(e: &Element) -> String {
    let mut s = format!("{} {}", element_kind_keyword(e.kind), e.id);
    if let Some(slots) = &e.slots {
        write!(
            s,
            " system {} context {} value {}",
            quote(slots.system()),
            quote(slots.context()),
            quote(slots.goal())
        )
        .unwrap();
    }
    if let Some(scope) = e.scope {
        write!(s, " scope {scope}").unwrap();
    }
    if let Some(loc) = &e.locator {
        write!(s, " at {}", quote(&loc.to_string())).unwrap();
    }
    if let Some(stage) = e.stage {
        write!(s, " stage {stage}").unwrap();
    }
    if e.tier != AudienceTier::Public {
        write!(s, " tier {}", e.tier).unwrap();
    }
    let rendered = e.slots.as_ref().map(|g| g.render());
    if e.kind != ElementKind::Goal || rendered.as_deref() != Some(e.text.as_str()) {
        write!(s, " {}", quote(&e.text)).unwrap();
    }
    s
}

pub fn link_line(l: &Link) -> String {
    let mut s = format!("link {} {} {} -> {}", l.id, l.kind, l.from, l.to);
    if let Some(q) = &l.qualifier {
        write!(s, " qualifier {}", q.label).unwrap();
        if let Some(n) = &q.note {
            write!(s, " {}", quote(n)).unwrap();
        }
    }
    s
}

fn verdict<T: std::fmt::Display>(s: &mut String, kw: &str, a: &Assessed<T>) {
    write!(s, " {kw} {}", a.verdict).unwrap();
    if let Some(n) = &a.note {
        write!(s, " {}", quote(n)).unwrap();
    }
}

pub fn appraisal_line(a: &AppraisalRecord) -> String {
    let mut s = format!("appraisal {}", a.evidence);
    verdict(&mut s, "relevance", &a.relevance);
    verdict(&mut s, "materiality", &a.materiality);
    verdict(&mut s, "admissibility", &a.admissibility);
    write!(s, " value {} by {} on {}", a.probative_value, quote(&a.assessor), a.date.format("%Y-%m-%d")).unwrap();
    s
}

pub fn challenge_line(c: &Challenge) -> String {
    let mut s = format!("challenge {} on {} by {} {}", c.id, c.target, quote(&c.author), quote(&c.text));
    if c.state != ChallengeState::Open || c.resolution_note.is_some() {
        write!(s, " state {}", c.state).unwrap();
        if let Some(n) = &c.resolution_note {
            write!(s, " note {}", quote(n)).unwrap();
        }
    }
    s
}
