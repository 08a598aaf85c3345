use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Value};

/// An error reply: status plus a JSON `{"error": {...}}` body.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what} '{id}'"))
    }

    pub fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, message)
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }

    pub fn body(&self) -> Value {
        json!({"error": {"status": self.status.as_u16(), "message": self.message}})
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body())).into_response()
    }
}

impl From<famsec_harness::HarnessError> for ApiError {
    fn from(e: famsec_harness::HarnessError) -> Self {
        use famsec_harness::HarnessError as H;
        match e {
            H::Validation(_) | H::MissingSurrogate(_) => ApiError::invalid(e.to_string()),
            H::Runtime(_) | H::Io(_) => ApiError::internal(e.to_string()),
        }
    }
}

macro_rules! via_harness {
    ($($t:ty),*) => {$(
        impl From<$t> for ApiError {
            fn from(e: $t) -> Self {
                famsec_harness::HarnessError::from(e).into()
            }
        }
    )*};
}

via_harness!(
    famsec_core::delivery::DeliveryError,
    famsec_core::solver::SolverError,
    famsec_core::surrogate::SurrogateError,
    famsec_core::outcome::OutcomeError,
    famsec_core::solver_quality::SolverQualityError,
    famsec_core::rollout::RolloutError
);
