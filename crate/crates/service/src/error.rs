use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;

/// Error body returned by every endpoint: `{code, message, detail}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServiceError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    pub detail: serde_json::Value,
}

impl ServiceError {
    pub fn new(status: u16, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.to_string(),
            message: message.into(),
            detail: serde_json::Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new(404, "unknown_session", format!("no session `{id}`"))
            .with_detail(serde_json::json!({ "session_id": id }))
    }

    pub fn phase_violation(message: impl Into<String>, phase: &str) -> Self {
        Self::new(409, "phase_violation", message).with_detail(serde_json::json!({ "phase": phase }))
    }

    pub fn not_clustered(modality: &str) -> Self {
        Self::new(409, "not_clustered", format!("modality {modality} is not clustered"))
            .with_detail(serde_json::json!({ "modality": modality }))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(400, "bad_request", message)
    }
}

impl From<stratix::Error> for ServiceError {
    fn from(e: stratix::Error) -> Self {
        let status = match e {
            stratix::Error::Io(_) => 500,
            _ => 422,
        };
        Self {
            status,
            code: e.code().to_string(),
            message: e.to_string(),
            detail: e.detail(),
        }
    }
}

impl std::fmt::Display for ServiceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.message, self.code)
    }
}

impl std::error::Error for ServiceError {}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, axum::Json(self)).into_response()
    }
}
