use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::filter::TierFilter;
use crate::model::{Case, Element, ElementKind, LinkKind};
use crate::Id;

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

fn shape(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Goal => "shape=box",
        ElementKind::PropertyClaim => "shape=box, style=rounded",
        ElementKind::EvidentialClaim => "shape=parallelogram",
        ElementKind::Evidence => "shape=ellipse",
        ElementKind::Warrant => "shape=note",
        ElementKind::Context => "shape=box, style=dashed",
        ElementKind::Assumption => "shape=ellipse, style=dashed",
    }
}

pub(crate) fn redaction_label(n: usize) -> String {
    format!("{n} {} redacted", if n == 1 { "element" } else { "elements" })
}

fn element_node(e: &Element) -> String {
    let mut label = format!("{} [{}]\n{}", e.id, e.kind, e.text);
    if let Some(l) = &e.locator {
        write!(label, "\n{l}").unwrap();
    }
    if let Some(s) = e.stage {
        write!(label, "\nstage: {s}").unwrap();
    }
    format!("  \"{}\" [{}, label=\"{}\"];", esc(e.id.as_str()), shape(e.kind), esc(&label))
}

/// Graphviz text for the part of `case` visible under `filter`. A link that
/// carries a warrant or challenge is routed through a point node so the
/// warrant can attach to the edge.
pub fn to_dot(case: &Case, filter: &TierFilter) -> String {
    let filtered = filter.apply(case);
    let c = &filtered.case;
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", esc(c.id().as_str())).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  labelloc=t;").unwrap();
    writeln!(out, "  label=\"{}\\n{}\";", esc(c.title()), redaction_label(filtered.redacted.len())).unwrap();
    writeln!(out, "  node [fontname=\"Helvetica\"];").unwrap();
    for e in c.elements().values() {
        writeln!(out, "{}", element_node(e)).unwrap();
    }
    let hub = |id: &Id| format!("link:{id}");
    let routed: BTreeSet<&Id> = c
        .links()
        .values()
        .filter(|l| l.kind == LinkKind::Warrants)
        .map(|l| &l.to)
        .chain(c.challenges().values().map(|ch| &ch.target).filter(|t| c.links().contains_key(*t)))
        .collect();
    for l in c.links().values() {
        let style = match l.kind {
            LinkKind::Supports => "",
            LinkKind::ContextOf => ", style=dashed, arrowhead=empty",
            LinkKind::Evidences => ", arrowhead=onormal",
            LinkKind::Warrants => ", style=dotted, arrowhead=none",
        };
        let mut label = l.id.to_string();
        if let Some(q) = &l.qualifier {
            write!(label, " ({})", q.label).unwrap();
        }
        let (from, to) = (esc(l.from.as_str()), esc(l.to.as_str()));
        if l.kind == LinkKind::Warrants {
            writeln!(out, "  \"{from}\" -> \"{}\" [label=\"{}\"{style}];", esc(&hub(&l.to)), esc(&label)).unwrap();
        } else if routed.contains(&l.id) {
            let h = esc(&hub(&l.id));
            writeln!(out, "  \"{h}\" [shape=point];").unwrap();
            writeln!(out, "  \"{from}\" -> \"{h}\" [arrowhead=none{style}];").unwrap();
            writeln!(out, "  \"{h}\" -> \"{to}\" [label=\"{}\"{style}];", esc(&label)).unwrap();
        } else {
            writeln!(out, "  \"{from}\" -> \"{to}\" [label=\"{}\"{style}];", esc(&label)).unwrap();
        }
    }
    for ch in c.challenges().values() {
        let node = format!("challenge:{}", ch.id);
        let label = format!("{} [{}] by {}\n{}", ch.id, ch.state, ch.author, ch.text);
        writeln!(out, "  \"{}\" [shape=octagon, color=red, label=\"{}\"];", esc(&node), esc(&label)).unwrap();
        let target = if c.links().contains_key(&ch.target) { hub(&ch.target) } else { ch.target.to_string() };
        writeln!(out, "  \"{}\" -> \"{}\" [color=red, style=dashed];", esc(&node), esc(&target)).unwrap();
    }
    out.push_str("}\n");
    out
}
