//! Ethical assurance cases: a goal-structured argument model, a plain-text
//! case language, defeasible status, evidence appraisal, argument patterns,
//! lifecycle snapshots and exporters.

pub mod appraisal;
pub mod corpus;
pub mod dsl;
pub mod export;
mod id;
pub(crate) mod keyword;
pub mod lifecycle;
pub mod model;
pub mod patterns;
pub mod validation;

pub use id::{is_valid_id, ChallengeId, ElementId, Id, InvalidId, LinkId};
pub use keyword::UnknownKeyword;
