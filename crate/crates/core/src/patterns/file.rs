//! Pattern files (`.eap`): header statements followed by skeleton lines.
//!
//! ```text
//! pattern interpretability
//! intent "Show a model is interpretable enough for its users"
//! applicability "Supervised models with a human in the loop"
//! risk "Post-hoc explanations may be unfaithful"
//! slot "ML Model" : free-text
//!   claim P1 scope system "The {ML Model} is sufficiently interpretable."
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{element_templates, link_templates, slots_in, Pattern, SlotType};
use crate::dsl::parser::{model_diag, statements, Mode, Stmt};
use crate::dsl::{body, codes, quote, ParseDiagnostic, SourceSpan};
use crate::model::{Fragment, LinkKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPattern {
    pub pattern: Pattern,
    pub warnings: Vec<ParseDiagnostic>,
}

fn once<T>(
    slot: &mut Option<(T, SourceSpan)>,
    value: T,
    span: SourceSpan,
    what: &str,
    diags: &mut Vec<ParseDiagnostic>,
) {
    if slot.is_some() {
        diags.push(ParseDiagnostic::error(span, codes::DUPLICATE_HEADER, format!("`{what}` appears more than once")));
    } else {
        *slot = Some((value, span));
    }
}

pub fn parse_pattern(source: &str) -> Result<ParsedPattern, Vec<ParseDiagnostic>> {
    let (stmts, mut diags) = statements(source, Mode::Pattern);
    let (mut id, mut intent, mut applicability) = (None, None, None);
    let mut risks = Vec::new();
    let mut slot_types: BTreeMap<String, (SlotType, SourceSpan)> = BTreeMap::new();
    let mut elements = Vec::new();
    let (mut links, mut warrants) = (Vec::new(), Vec::new());
    for (stmt, span) in stmts {
        match stmt {
            Stmt::Pattern(p) => once(&mut id, p, span, "pattern", &mut diags),
            Stmt::Intent(t) => once(&mut intent, t, span, "intent", &mut diags),
            Stmt::Applicability(t) => once(&mut applicability, t, span, "applicability", &mut diags),
            Stmt::Risk(t) => risks.push(t),
            Stmt::Slot(name, ty) => {
                if slot_types.insert(name.clone(), (ty, span)).is_some() {
                    diags.push(ParseDiagnostic::error(span, codes::DUPLICATE_ID, format!("slot `{name}` declared twice")));
                }
            }
            Stmt::Element(e) => elements.push((e, span)),
            Stmt::Link(l) if l.kind == LinkKind::Warrants => warrants.push((l, span)),
            Stmt::Link(l) => links.push((l, span)),
            Stmt::Header { .. } | Stmt::Appraisal(_) | Stmt::Challenge(_) => {
                unreachable!("case statements are rejected in pattern mode")
            }
        }
    }
    let start = SourceSpan::new(1, 1, 1);
    for (present, what) in [(id.is_some(), "pattern <id>"), (intent.is_some(), "intent"), (applicability.is_some(), "applicability")] {
        if !present {
            diags.push(ParseDiagnostic::error(start, codes::MISSING_HEADER, format!("missing `{what}` statement")));
        }
    }

    let mut skeleton = Fragment::default();
    let mut used = BTreeSet::new();
    let mut check_templates = |texts: Vec<String>, span: SourceSpan, diags: &mut Vec<ParseDiagnostic>| {
        for t in texts {
            match slots_in(&t) {
                Ok(names) => {
                    for n in names {
                        if !slot_types.contains_key(&n) {
                            diags.push(ParseDiagnostic::error(span, codes::UNDECLARED_SLOT, format!("slot `{n}` is not declared")));
                        }
                        used.insert(n);
                    }
                }
                Err(e) => diags.push(ParseDiagnostic::error(span, codes::SYNTAX, e.to_string())),
            }
        }
    };
    for (e, span) in elements {
        check_templates(element_templates(&e).into_iter().map(|(_, t)| t).collect(), span, &mut diags);
        if let Err(err) = skeleton.insert_element(e, |_| false) {
            diags.push(model_diag(span, &err));
        }
    }
    for (l, span) in links.into_iter().chain(warrants) {
        check_templates(link_templates(&l).into_iter().collect(), span, &mut diags);
        if let Err(err) = skeleton.insert_link(l, |_| false) {
            diags.push(model_diag(span, &err));
        }
    }
    for (name, (_, span)) in &slot_types {
        if !used.contains(name) {
            diags.push(ParseDiagnostic::warning(*span, codes::UNUSED_SLOT, format!("slot `{name}` is never used")));
        }
    }
    diags.sort_by_key(|a| a.span);
    if diags.iter().any(ParseDiagnostic::is_error) {
        return Err(diags);
    }
    let (Some((id, _)), Some((intent, _)), Some((applicability, _))) = (id, intent, applicability) else {
        unreachable!("missing header statements are reported as errors")
    };
    let slot_types = slot_types.into_iter().map(|(k, (t, _))| (k, t)).collect();
    match Pattern::new(id, intent, applicability, risks, skeleton, slot_types) {
        Ok(pattern) => Ok(ParsedPattern { pattern, warnings: diags }),
        Err(e) => Err(vec![ParseDiagnostic::error(start, codes::SYNTAX, e.to_string())]),
    }
}

pub fn serialize_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    writeln!(out, "pattern {}", p.id).unwrap();
    writeln!(out, "intent {}", quote(&p.intent)).unwrap();
    writeln!(out, "applicability {}", quote(&p.applicability)).unwrap();
    for r in &p.risks {
        writeln!(out, "risk {}", quote(r)).unwrap();
    }
    for (name, ty) in &p.slot_types {
        writeln!(out, "slot {} : {ty}", quote(name)).unwrap();
    }
    body(&mut out, p.skeleton.elements().values(), p.skeleton.links().values());
    out
}
