use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use zeck_core::game::{GameState, Move};
use zeck_core::Error;

/// Error body `{"error": code, "message": …}` with its HTTP status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl ToString) -> Self {
        Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_params",
            message.to_string(),
        )
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no game with id {id}"),
        )
    }

    pub fn illegal(mv: Move, state: &GameState) -> Self {
        Self::new(
            StatusCode::CONFLICT,
            "illegal_move",
            format!("{mv} is not legal from {}", state.notation()),
        )
    }

    pub fn finished() -> Self {
        Self::new(StatusCode::GONE, "game_finished", "the game is over")
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    pub fn from_core(err: Error) -> Self {
        match err {
            Error::StateBudgetExceeded { .. } => Self::new(
                StatusCode::INSUFFICIENT_STORAGE,
                "budget_exceeded",
                err.to_string(),
            ),
            Error::InvalidInput(_) | Error::Overflow { .. } | Error::UnsupportedSpec { .. } => {
                Self::invalid(err)
            }
            Error::IllegalMove { .. } => {
                Self::new(StatusCode::CONFLICT, "illegal_move", err.to_string())
            }
            _ => Self::internal(err.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Json(json!({ "error": self.code, "message": self.message }));
        (self.status, body).into_response()
    }
}
