//! Problem-detail errors returned by the HTTP API.

use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use elens_core::assessors::AssessorError;
use elens_core::checklist::ChecklistError;
use elens_core::goal::GoalError;
use elens_core::model::ModelError;
use elens_core::stpa::StpaError;
use elens_core::workflow::WorkflowError;
use serde::{Deserialize, Serialize};

use crate::store::StoreError;

/// Body of every error response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub problem: Problem,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            problem: Problem {
                code: code.to_string(),
                message: message.into(),
                field: None,
                details: None,
            },
        }
    }

    pub fn field(mut self, field: &str) -> Self {
        self.problem.field = Some(field.to_string());
        self
    }

    pub fn details(mut self, details: impl Serialize) -> Self {
        self.problem.details = serde_json::to_value(details).ok();
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("unknown {what} `{id}`"))
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "forbidden", message)
    }

    pub fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", "unknown bearer token")
    }

    pub fn invalid(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    pub fn conflict(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::to_vec(&self.problem).expect("problem serializes");
        (self.status, [(header::CONTENT_TYPE, "application/problem+json")], body).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::NotFound(id) => ApiError::not_found("case", id),
            StoreError::Exists(_) => ApiError::conflict("case_exists", e.to_string()),
            StoreError::VersionConflict { current, .. } => {
                ApiError::conflict("version_conflict", e.to_string()).details(serde_json::json!({ "current": current }))
            }
            StoreError::Io { .. } | StoreError::Corrupt { .. } => {
                tracing::error!("store failure: {e}");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string())
            }
        }
    }
}

impl From<WorkflowError> for ApiError {
    fn from(e: WorkflowError) -> Self {
        let message = e.to_string();
        match e {
            WorkflowError::Forbidden { .. } => ApiError::forbidden(message),
            WorkflowError::IllegalTransition { .. } => ApiError::conflict("illegal_transition", message),
            WorkflowError::UnknownQuestion(id) => ApiError::not_found("question", &id),
            WorkflowError::Retired(_) => ApiError::conflict("retired", message),
            WorkflowError::NoAnswer(_) => ApiError::conflict("no_answer", message),
            WorkflowError::UnlinkedQuestion(_) => ApiError::invalid("unlinked_question", message),
            WorkflowError::MissingComment => ApiError::invalid("missing_comment", message).field("text"),
            WorkflowError::EmptyFlagList => ApiError::invalid("empty_flag_list", message).field("flagged_questions"),
        }
    }
}

impl From<ChecklistError> for ApiError {
    fn from(e: ChecklistError) -> Self {
        let message = e.to_string();
        match e {
            ChecklistError::Forbidden { .. } => ApiError::forbidden(message),
            ChecklistError::UnknownQuestion(id) => ApiError::not_found("question", &id),
            ChecklistError::Retired(_) => ApiError::conflict("retired", message),
            ChecklistError::AnswerLocked { .. } => ApiError::conflict("answer_locked", message),
            ChecklistError::Answered(_) => ApiError::conflict("answered", message),
            ChecklistError::DuplicateId(_) => ApiError::conflict("duplicate_id", message),
            ChecklistError::TypeMismatch { .. } => ApiError::invalid("type_mismatch", message),
            _ => ApiError::invalid("invalid_question", message),
        }
    }
}

impl From<AssessorError> for ApiError {
    fn from(e: AssessorError) -> Self {
        match e {
            AssessorError::Checklist(e) => e.into(),
            AssessorError::NotAlgorithmic(_) => ApiError::invalid("not_algorithmic", e.to_string()),
            AssessorError::MissingParam(p) => ApiError::invalid("missing_parameter", e.to_string()).field(p),
            e => ApiError::invalid("invalid_metric_input", e.to_string()).field("file"),
        }
    }
}

impl From<GoalError> for ApiError {
    fn from(e: GoalError) -> Self {
        ApiError::invalid("goal_graph", e.to_string())
    }
}

impl From<StpaError> for ApiError {
    fn from(e: StpaError) -> Self {
        let message = e.to_string();
        match e {
            StpaError::UnknownElement(id) => ApiError::not_found("element", &id),
            StpaError::IncompleteCase(v) => ApiError::invalid("incomplete_case", message).details(v),
            _ => ApiError::invalid("stpa", message),
        }
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownElement(id) => ApiError::not_found("element", &id),
            e => ApiError::invalid("model", e.to_string()),
        }
    }
}
