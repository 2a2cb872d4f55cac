//! Compiler-style finding lines: `SEVERITY CODE file:line:col message`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use eac_core::dsl::{DiagnosticSeverity, ParseDiagnostic, SourceSpan};
use eac_core::validation::{Finding, Severity};
use eac_core::Id;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Located {
    pub severity: &'static str,
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Id>,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Located {
    pub fn is_error(&self) -> bool {
        self.severity == "error"
    }

    pub fn from_parse(d: &ParseDiagnostic) -> Self {
        Located {
            severity: match d.severity {
                DiagnosticSeverity::Error => "error",
                DiagnosticSeverity::Warning => "warning",
            },
            code: d.code.to_string(),
            target: None,
            line: d.span.line,
            column: d.span.column,
            message: d.message.clone(),
        }
    }

    /// A validation finding placed at its target's definition, or at
    /// `fallback` (the case header) for case-level findings.
    pub fn from_finding(f: &Finding, spans: &BTreeMap<Id, SourceSpan>, fallback: SourceSpan) -> Self {
        let span = spans.get(&f.target).copied().unwrap_or(fallback);
        Located {
            severity: match f.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            },
            code: f.code.clone(),
            target: Some(f.target.clone()),
            line: span.line,
            column: span.column,
            message: f.message.clone(),
        }
    }
}

/// Where the `case` header sits, for findings about the case as a whole.
pub fn header_span(source: &str) -> SourceSpan {
    for (i, line) in source.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("case") {
            return SourceSpan::new(i + 1, line.len() - trimmed.len() + 1, 4);
        }
    }
    SourceSpan::new(1, 1, 1)
}

pub fn sort(findings: &mut [Located]) {
    findings.sort_by(|a, b| (a.line, a.column, &a.code).cmp(&(b.line, b.column, &b.code)));
}

pub fn summary(findings: &[Located]) -> String {
    let errors = findings.iter().filter(|f| f.is_error()).count();
    let warnings = findings.len() - errors;
    let plural = |n: usize, word: &str| format!("{n} {word}{}", if n == 1 { "" } else { "s" });
    format!("{}, {}", plural(errors, "error"), plural(warnings, "warning"))
}

pub fn write_human(out: &mut dyn Write, file: &str, findings: &[Located]) -> io::Result<()> {
    for f in findings {
        writeln!(out, "{} {} {}:{}:{} {}", f.severity.to_uppercase(), f.code, file, f.line, f.column, f.message)?;
    }
    writeln!(out, "{}", summary(findings))
}

pub fn json_doc(file: &str, findings: &[Located]) -> Value {
    let errors = findings.iter().filter(|f| f.is_error()).count();
    json!({
        "version": "1",
        "file": file,
        "findings": findings,
        "errors": errors,
        "warnings": findings.len() - errors,
    })
}
