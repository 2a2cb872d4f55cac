//! Interchange JSON, Graphviz and Markdown renderings, with tier filtering.

mod dot;
mod filter;
mod interchange;
mod report;

pub use dot::to_dot;
pub use filter::{Filtered, TierFilter};
pub use interchange::{
    diag_codes, from_interchange, sufficiency_document, to_interchange, InterchangeDiagnostic, INTERCHANGE_VERSION,
};
pub use report::{to_report, to_report_with};

