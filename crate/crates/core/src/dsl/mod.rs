//! The line-oriented case language (`.eac`).
//!
//! ```text
//! case "Title" phase interim id demo
//!   goal G1 system "tool" context "staff" value "equity"
//!   context X1 "Deployed in two hospital trusts"
//!   link L1 contextOf X1 -> G1
//! ```

mod diagnostic;
mod lexer;
pub(crate) mod parser;
mod writer;

pub use diagnostic::{codes, DiagnosticSeverity, ParseDiagnostic, SourceSpan};
pub use lexer::quote;
pub use parser::{parse, parse_case, Parsed, DEFAULT_CASE_ID};
pub use writer::{appraisal_line, challenge_line, element_line, link_line, serialize};

pub(crate) use writer::body;
