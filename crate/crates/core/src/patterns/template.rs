//! Slot syntax inside pattern texts: `{name}` marks a slot, `{{` and `}}`
//! stand for literal braces.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateSyntaxError {
    #[error("unclosed `{{` in {0:?}")]
    Unclosed(String),
    #[error("stray `}}` in {0:?}")]
    Stray(String),
    #[error("invalid slot name {name:?} in {text:?}")]
    BadName { name: String, text: String },
    #[error("no binding for slot `{0}`")]
    Unbound(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Piece {
    Lit(String),
    Slot(String),
}

/// Slot names may contain spaces but not braces or line breaks.
pub fn is_valid_slot_name(s: &str) -> bool {
    !s.trim().is_empty() && s == s.trim() && !s.contains(['{', '}', '\n', '\r', '"'])
}

pub(crate) fn pieces(text: &str) -> Result<Vec<Piece>, TemplateSyntaxError> {
    let mut out = Vec::new();
    let mut lit = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '{' if chars.peek() == Some(&'{') => {
                chars.next();
                lit.push('{');
            }
            '}' if chars.peek() == Some(&'}') => {
                chars.next();
                lit.push('}');
            }
            '}' => return Err(TemplateSyntaxError::Stray(text.to_string())),
            '{' => {
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some('{') | None => return Err(TemplateSyntaxError::Unclosed(text.to_string())),
                        Some(ch) => name.push(ch),
                    }
                }
                if !is_valid_slot_name(&name) {
                    return Err(TemplateSyntaxError::BadName { name, text: text.to_string() });
                }
                if !lit.is_empty() {
                    out.push(Piece::Lit(std::mem::take(&mut lit)));
                }
                out.push(Piece::Slot(name));
            }
            _ => lit.push(c),
        }
    }
    if !lit.is_empty() {
        out.push(Piece::Lit(lit));
    }
    Ok(out)
}

/// Names of the slots used in `text`.
pub fn slots_in(text: &str) -> Result<BTreeSet<String>, TemplateSyntaxError> {
    Ok(pieces(text)?
        .into_iter()
        .filter_map(|p| match p {
            Piece::Slot(s) => Some(s),
            Piece::Lit(_) => None,
        })
        .collect())
}

pub fn substitute(text: &str, values: &BTreeMap<String, String>) -> Result<String, TemplateSyntaxError> {
    let mut out = String::new();
    for p in pieces(text)? {
        match p {
            Piece::Lit(s) => out.push_str(&s),
            Piece::Slot(name) => match values.get(&name) {
                Some(v) => out.push_str(v),
                None => return Err(TemplateSyntaxError::Unbound(name)),
            },
        }
    }
    Ok(out)
}

/// Template text standing for `text` verbatim.
pub fn escape(text: &str) -> String {
    text.replace('{', "{{").replace('}', "}}")
}

/// `{name}`
pub fn placeholder(name: &str) -> String {
    format!("{{{name}}}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_and_escapes() {
        let t = "The {ML Model} is sufficiently {interpretable} in the intended {context}.";
        let names: Vec<_> = slots_in(t).unwrap().into_iter().collect();
        assert_eq!(names, ["ML Model", "context", "interpretable"]);
        assert!(slots_in("a {{literal}} b").unwrap().is_empty());
        assert_eq!(substitute("{{x}} {y}", &BTreeMap::from([("y".into(), "1".into())])).unwrap(), "{x} 1");
        assert_eq!(substitute(&escape("a {b} }"), &BTreeMap::new()).unwrap(), "a {b} }");
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(slots_in("a {b"), Err(TemplateSyntaxError::Unclosed(_))));
        assert!(matches!(slots_in("a } b"), Err(TemplateSyntaxError::Stray(_))));
        assert!(matches!(slots_in("a {} b"), Err(TemplateSyntaxError::BadName { .. })));
        assert_eq!(substitute("{z}", &BTreeMap::new()), Err(TemplateSyntaxError::Unbound("z".into())));
    }
}
