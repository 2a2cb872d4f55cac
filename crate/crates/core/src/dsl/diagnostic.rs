use std::fmt;

use serde::Serialize;

use crate::keyword::keyword_enum;

/// Stable diagnostic codes.
pub mod codes {
    pub const SYNTAX: &str = "E-SYNTAX";
    pub const UNTERMINATED_STRING: &str = "E-UNTERMINATED-STRING";
    pub const BAD_ESCAPE: &str = "E-BAD-ESCAPE";
    pub const UNKNOWN_KEYWORD: &str = "E-UNKNOWN-KEYWORD";
    pub const MISSING_HEADER: &str = "E-MISSING-HEADER";
    pub const DUPLICATE_HEADER: &str = "E-DUPLICATE-HEADER";
    pub const BAD_ID: &str = "E-BAD-ID";
    pub const BAD_VALUE: &str = "E-BAD-VALUE";
    pub const UNKNOWN_STAGE: &str = "E-UNKNOWN-STAGE";
    pub const BAD_LOCATOR: &str = "E-BAD-LOCATOR";
    pub const EMPTY_TEXT: &str = "E-EMPTY-TEXT";
    pub const GOAL_SLOTS: &str = "E-GOAL-SLOTS";
    pub const UNDERSPECIFIED_GOAL: &str = "E-UNDERSPECIFIED-GOAL";
    pub const BRACE_IN_SLOT: &str = "E-BRACE-IN-SLOT";
    pub const DUPLICATE_ID: &str = "E-DUPLICATE-ID";
    pub const DANGLING_REF: &str = "E-DANGLING-REF";
    pub const KIND_MISMATCH: &str = "E-KIND-MISMATCH";
    pub const CYCLE: &str = "E-CYCLE";
    pub const QUALIFIER: &str = "E-QUALIFIER";
    pub const DUPLICATE_LINK: &str = "E-DUPLICATE-LINK";
    pub const NOTE_REQUIRED: &str = "E-NOTE-REQUIRED";
    pub const NOT_EVIDENCE: &str = "E-NOT-EVIDENCE";
    pub const VALUE_RANGE: &str = "E-VALUE-RANGE";
    pub const UNDECLARED_SLOT: &str = "E-UNDECLARED-SLOT";
    pub const UNUSED_SLOT: &str = "W-UNUSED-SLOT";
    pub const SUPERSEDED_APPRAISAL: &str = "W-SUPERSEDED-APPRAISAL";

    /// Codes describing a well-formed file whose argument structure is
    /// wrong, as opposed to text that could not be read at all.
    pub const STRUCTURAL: &[&str] = &[
        UNDERSPECIFIED_GOAL,
        BRACE_IN_SLOT,
        DUPLICATE_ID,
        DANGLING_REF,
        KIND_MISMATCH,
        CYCLE,
        QUALIFIER,
        DUPLICATE_LINK,
        NOTE_REQUIRED,
        NOT_EVIDENCE,
        UNDECLARED_SLOT,
    ];
}

/// 1-based position of a single-line run of characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        SourceSpan { line, column, length: length.max(1) }
    }

    /// From the start of `self` to the end of `other` (same line).
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        debug_assert_eq!(self.line, other.line);
        SourceSpan::new(self.line, self.column, other.column + other.length - self.column)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

keyword_enum! {
    pub enum DiagnosticSeverity {
        Error => "error",
        Warning => "warning",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: DiagnosticSeverity,
    pub span: SourceSpan,
    pub code: &'static str,
    pub message: String,
}

impl ParseDiagnostic {
    pub fn error(span: SourceSpan, code: &'static str, message: impl Into<String>) -> Self {
        ParseDiagnostic { severity: DiagnosticSeverity::Error, span, code, message: message.into() }
    }

    pub fn warning(span: SourceSpan, code: &'static str, message: impl Into<String>) -> Self {
        ParseDiagnostic { severity: DiagnosticSeverity::Warning, span, code, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == DiagnosticSeverity::Error
    }

    pub fn is_structural(&self) -> bool {
        codes::STRUCTURAL.contains(&self.code)
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.severity, self.code, self.span, self.message)
    }
}
