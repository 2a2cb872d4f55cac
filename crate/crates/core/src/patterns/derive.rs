//! Bottom-up pattern derivation by anti-unification of aligned cases.
//!
//! Each case is walked depth-first from its root goals in id order,
//! following links into a node in (source kind, link kind, source id, link
//! id) order, and visiting the warrants of a link right after the link
//! itself. Elements not reached from a root follow in (kind, id) order. Position in this
//! walk is the alignment; ties between cases are aligned by ordinal.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{
    derived_goal_text, element_templates, escape, link_templates, placeholder, Bindings, Pattern, PatternError, SlotType,
};
use crate::model::{Case, Fragment, GoalSlots, Link, LinkKind, Locator, ModelError};
use crate::Id;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveFailure {
    #[error("derivation needs at least two cases, got {0}")]
    TooFewCases(usize),
    #[error("case `{case}` does not align with `{first}`: {reason}")]
    ShapeMismatch { first: Id, case: Id, reason: String },
    #[error("case `{case}` value for slot `{slot}` cannot be bound: {reason}")]
    Unbindable { case: Id, slot: String, reason: String },
    #[error("derived skeleton is invalid: {0}")]
    Skeleton(String),
}

impl From<ModelError> for DeriveFailure {
    fn from(e: ModelError) -> Self {
        DeriveFailure::Skeleton(e.to_string())
    }
}

impl From<PatternError> for DeriveFailure {
    fn from(e: PatternError) -> Self {
        DeriveFailure::Skeleton(e.to_string())
    }
}

struct Walk {
    elements: Vec<Id>,
    links: Vec<Id>,
}

fn walk(case: &Case) -> Walk {
    let mut w = Walk { elements: Vec::new(), links: Vec::new() };
    let mut seen = BTreeSet::new();
    let kind = |id: &Id| case.elements()[id].kind;
    fn visit(case: &Case, id: &Id, seen: &mut BTreeSet<Id>, w: &mut Walk, kind: &dyn Fn(&Id) -> crate::model::ElementKind) {
        if !seen.insert(id.clone()) {
            return;
        }
        w.elements.push(id.clone());
        let mut into: Vec<&Link> = case.graph().links_into(id.as_str()).collect();
        into.sort_by(|a, b| (kind(&a.from), a.kind, &a.from, &a.id).cmp(&(kind(&b.from), b.kind, &b.from, &b.id)));
        for l in into {
            w.links.push(l.id.clone());
            visit(case, &l.from, seen, w, kind);
            let mut warrants: Vec<&Link> = case.graph().links_into(l.id.as_str()).collect();
            warrants.sort_by(|a, b| (&a.from, &a.id).cmp(&(&b.from, &b.id)));
            for wl in warrants {
                w.links.push(wl.id.clone());
                visit(case, &wl.from, seen, w, kind);
            }
        }
    }
    for g in case.root_goals() {
        visit(case, &g.id, &mut seen, &mut w, &kind);
    }
    let mut rest: Vec<&Id> = case.elements().keys().filter(|id| !seen.contains(*id)).collect();
    rest.sort_by_key(|id| (kind(id), *id));
    for id in rest {
        visit(case, id, &mut seen, &mut w, &kind);
    }
    w
}

/// Kind-labelled shape of one aligned position, excluding texts.
fn element_shape(case: &Case, id: &Id) -> String {
    let e = &case.elements()[id];
    let fields: Vec<&str> = element_templates(e).iter().map(|(f, _)| *f).collect();
    format!("{} stage={:?} scope={:?} tier={} fields={fields:?}", e.kind, e.stage, e.scope, e.tier)
}

fn link_shape(case: &Case, id: &Id, el: &BTreeMap<&Id, usize>, ln: &BTreeMap<&Id, usize>) -> String {
    let l = &case.links()[id];
    let to = match l.kind {
        LinkKind::Warrants => format!("link#{}", ln[&l.to]),
        _ => format!("element#{}", el[&l.to]),
    };
    let q = l.qualifier.as_ref().map(|q| (q.label, q.note.is_some()));
    format!("{} element#{} -> {to} qualifier={q:?}", l.kind, el[&l.from])
}

struct Slotter {
    types: BTreeMap<String, SlotType>,
    values: Vec<BTreeMap<String, String>>,
}

impl Slotter {
    /// The template for one aligned field: the shared text, or a fresh slot.
    fn field(&mut self, name: &str, values: Vec<String>) -> String {
        if values.iter().all(|v| *v == values[0]) {
            return escape(&values[0]);
        }
        let slot = format!("s{}", self.types.len() + 1);
        let ty = match name {
            "system" => SlotType::System,
            "context" => SlotType::Context,
            "goal" => SlotType::Goal,
            _ => SlotType::FreeText,
        };
        self.types.insert(slot.clone(), ty);
        for (map, v) in self.values.iter_mut().zip(values) {
            map.insert(slot.clone(), v);
        }
        placeholder(&slot)
    }
}

fn derive_raw(cases: &[Case]) -> Result<(Pattern, Vec<BTreeMap<String, String>>), DeriveFailure> {
    if cases.len() < 2 {
        return Err(DeriveFailure::TooFewCases(cases.len()));
    }
    let walks: Vec<Walk> = cases.iter().map(walk).collect();
    let shapes: Vec<Vec<String>> = cases
        .iter()
        .zip(&walks)
        .map(|(c, w)| {
            let el: BTreeMap<&Id, usize> = w.elements.iter().enumerate().map(|(i, id)| (id, i)).collect();
            let ln: BTreeMap<&Id, usize> = w.links.iter().enumerate().map(|(i, id)| (id, i)).collect();
            w.elements
                .iter()
                .map(|id| element_shape(c, id))
                .chain(w.links.iter().map(|id| link_shape(c, id, &el, &ln)))
                .collect()
        })
        .collect();
    let (first, w0) = (&cases[0], &walks[0]);
    for (i, c) in cases.iter().enumerate().skip(1) {
        let mismatch = |reason: String| DeriveFailure::ShapeMismatch { first: first.id().clone(), case: c.id().clone(), reason };
        if walks[i].elements.len() != w0.elements.len() || walks[i].links.len() != w0.links.len() {
            return Err(mismatch(format!(
                "{} elements and {} links versus {} and {}",
                walks[i].elements.len(),
                walks[i].links.len(),
                w0.elements.len(),
                w0.links.len()
            )));
        }
        if let Some(pos) = (0..shapes[0].len()).find(|&p| shapes[i][p] != shapes[0][p]) {
            return Err(mismatch(format!("position {pos}: `{}` versus `{}`", shapes[i][pos], shapes[0][pos])));
        }
    }

    let mut slotter = Slotter { types: BTreeMap::new(), values: vec![BTreeMap::new(); cases.len()] };
    let mut skeleton = Fragment::default();
    for (pos, id0) in w0.elements.iter().enumerate() {
        let aligned: Vec<_> = cases.iter().zip(&walks).map(|(c, w)| &c.elements()[&w.elements[pos]]).collect();
        let per_case: Vec<Vec<(&'static str, String)>> = aligned.iter().map(|e| element_templates(e)).collect();
        let mut templates: BTreeMap<&'static str, String> = BTreeMap::new();
        for (f, (name, _)) in per_case[0].iter().enumerate() {
            let values = per_case.iter().map(|fields| fields[f].1.clone()).collect();
            templates.insert(name, slotter.field(name, values));
        }
        let mut e = first.elements()[id0].clone();
        if e.slots.is_some() {
            let slots = GoalSlots::template(
                templates["system"].clone(),
                templates["context"].clone(),
                templates["goal"].clone(),
            )
            .map_err(|err| DeriveFailure::Skeleton(err.to_string()))?;
            e.text = if derived_goal_text(&e) { slots.render() } else { templates["text"].clone() };
            e.slots = Some(slots);
        } else {
            e.text = templates["text"].clone();
        }
        if let Some(t) = templates.get("locator") {
            e.locator = Some(Locator::parse(t).map_err(|err| DeriveFailure::Skeleton(err.to_string()))?);
        }
        skeleton.insert_element(e, |_| false)?;
    }
    let mut links = Vec::new();
    for (pos, id0) in w0.links.iter().enumerate() {
        let mut l = first.links()[id0].clone();
        if link_templates(&l).is_some() {
            let values = cases
                .iter()
                .zip(&walks)
                .map(|(c, w)| link_templates(&c.links()[&w.links[pos]]).expect("aligned shapes agree"))
                .collect();
            let t = slotter.field("note", values);
            l.qualifier.as_mut().expect("note implies qualifier").note = Some(t);
        }
        links.push(l);
    }
    let (warrants, others): (Vec<Link>, Vec<Link>) = links.into_iter().partition(|l| l.kind == LinkKind::Warrants);
    for l in others.into_iter().chain(warrants) {
        skeleton.insert_link(l, |_| false)?;
    }

    let ids: Vec<String> = cases.iter().map(|c| c.id().to_string()).collect();
    let sources = ids.join(", ");
    let id = first.id().prefixed("derived_").map_err(|e| DeriveFailure::Skeleton(e.to_string()))?;
    let pattern = Pattern::new(
        id,
        format!("Derived from cases {sources}; state the intent."),
        format!("Derived from cases {sources}; state where this pattern applies."),
        Vec::new(),
        skeleton,
        slotter.types,
    )?;
    Ok((pattern, slotter.values))
}

/// Anti-unifies two or more cases into a pattern.
pub fn derive(cases: &[Case]) -> Result<Pattern, DeriveFailure> {
    derive_raw(cases).map(|(p, _)| p)
}

/// As [`derive`], also returning the bindings that reproduce each input.
pub fn derive_with_bindings(cases: &[Case]) -> Result<(Pattern, Vec<Bindings>), DeriveFailure> {
    let (pattern, raw) = derive_raw(cases)?;
    let mut all = Vec::new();
    for (case, values) in cases.iter().zip(raw) {
        let mut b = Bindings::new();
        for (slot, v) in values {
            b = b.bind(slot.clone(), v).map_err(|e| DeriveFailure::Unbindable {
                case: case.id().clone(),
                slot,
                reason: e.to_string(),
            })?;
        }
        all.push(b);
    }
    Ok((pattern, all))
}
