use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use eac_core::dsl::codes;
use eac_core::model::ModelError;
use serde::{Deserialize, Serialize};

/// Error body of every failed request. `pointer` is a JSON pointer into
/// the request body, `/query/<name>` or `/headers/<name>` for parameters,
/// and empty when the whole request is at fault.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub code: String,
    pub message: String,
    pub pointer: String,
    #[serde(skip, default = "internal")]
    pub status: u16,
}

fn internal() -> u16 {
    500
}

pub const NOT_FOUND: &str = "E-NOT-FOUND";
pub const BAD_REQUEST: &str = "E-BAD-REQUEST";
pub const ALREADY_CLOSED: &str = "E-ALREADY-CLOSED";
pub const INTERNAL: &str = "E-INTERNAL";

impl Problem {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>, pointer: impl Into<String>) -> Self {
        Problem { code: code.to_string(), message: message.into(), pointer: pointer.into(), status: status.as_u16() }
    }

    pub fn not_found(message: impl Into<String>, pointer: impl Into<String>) -> Self {
        Problem::new(StatusCode::NOT_FOUND, NOT_FOUND, message, pointer)
    }

    pub fn bad_request(message: impl Into<String>, pointer: impl Into<String>) -> Self {
        Problem::new(StatusCode::BAD_REQUEST, BAD_REQUEST, message, pointer)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Problem::new(StatusCode::INTERNAL_SERVER_ERROR, INTERNAL, message, "")
    }

    /// A model rejection of a challenge mutation.
    pub fn from_model(err: &ModelError) -> Self {
        let unprocessable = StatusCode::UNPROCESSABLE_ENTITY;
        let message = err.to_string();
        match err {
            ModelError::DanglingTarget { .. } => Problem::new(unprocessable, codes::DANGLING_REF, message, "/target"),
            ModelError::InvalidChallengeText { field, .. } => {
                Problem::new(unprocessable, codes::EMPTY_TEXT, message, format!("/{field}"))
            }
            ModelError::NoteRequired { .. } => Problem::new(unprocessable, codes::NOTE_REQUIRED, message, "/note"),
            ModelError::AlreadyClosed { .. } => Problem::new(StatusCode::CONFLICT, ALREADY_CLOSED, message, ""),
            ModelError::NotFound(_) => Problem::not_found(message, ""),
            _ => Problem::internal(message),
        }
    }
}

impl IntoResponse for Problem {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = serde_json::to_string(&self).expect("problems serialize");
        (status, [(header::CONTENT_TYPE, "application/problem+json")], body).into_response()
    }
}
