use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

/// Machine-readable error codes carried in every error body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    StateUnknown,
    BadParameter,
    BadRange,
    TopicUnknown,
    LdaUnavailable,
    NotFound,
    Internal,
}

impl ErrorCode {
    pub fn http_status(&self) -> u16 {
        match self {
            ErrorCode::StateUnknown | ErrorCode::BadParameter | ErrorCode::BadRange | ErrorCode::TopicUnknown => 400,
            ErrorCode::NotFound => 404,
            ErrorCode::LdaUnavailable => 503,
            ErrorCode::Internal => 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ErrorDetail {
    pub code: ErrorCode,
    pub message: String,
}

/// `{"error": {"code": "...", "message": "..."}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema, thiserror::Error)]
#[error("{}: {}", serde_json::to_string(&.error.code).unwrap_or_default(), .error.message)]
pub struct ApiError {
    pub error: ErrorDetail,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            error: ErrorDetail {
                code,
                message: message.into(),
            },
        }
    }

    pub fn code(&self) -> ErrorCode {
        self.error.code
    }

    pub fn bad_parameter(name: &str, detail: impl std::fmt::Display) -> Self {
        ApiError::new(ErrorCode::BadParameter, format!("parameter `{name}`: {detail}"))
    }
}

impl From<coronavis_core::analysis::QueryError> for ApiError {
    fn from(e: coronavis_core::analysis::QueryError) -> Self {
        use coronavis_core::analysis::QueryError;
        use coronavis_core::topicmodel::TopicModelError;
        let code = match &e {
            QueryError::InvalidRange { .. } => ErrorCode::BadRange,
            QueryError::InvalidParameter(_) => ErrorCode::BadParameter,
            QueryError::LdaUnavailable(_) => ErrorCode::LdaUnavailable,
            QueryError::Topic(TopicModelError::InvalidTopic { .. }) => ErrorCode::TopicUnknown,
            QueryError::Topic(_) => ErrorCode::BadParameter,
        };
        ApiError::new(code, e.to_string())
    }
}
