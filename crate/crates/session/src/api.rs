//! HTTP routes. Every body is JSON; errors are `{"error": "..."}`.
//!
//! | method | path                     | body                          | reply                               |
//! |--------|--------------------------|-------------------------------|-------------------------------------|
//! | POST   | `/sessions`              | `{participant_id, mode, seed?}` | `{session_id}`                    |
//! | GET    | `/sessions/{id}/word`    |                               | `{task_id, scramble, position, index, total}` |
//! | POST   | `/sessions/{id}/guess`   | `{text}`                      | `{correct, guesses_so_far}`         |
//! | POST   | `/sessions/{id}/skip`    |                               | `{}`                                |
//! | POST   | `/sessions/{id}/rating`  | `{urd?}`                      | `{iwd_crisp, iwd_category}`         |
//! | GET    | `/sessions/{id}/summary` |                               | session fields and `records`        |

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, PathRejection};
use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use uuid::Uuid;

use crate::service::{RatingOutcome, ServiceError, SessionService, Summary, WordView};
use crate::session::{GuessOutcome, Mode, SessionError};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = match &e {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Session(SessionError::Rating(_)) | ServiceError::EmptyParticipant => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ServiceError::Session(_) => StatusCode::CONFLICT,
            ServiceError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(e.status(), e.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        Self::new(StatusCode::NOT_FOUND, e.body_text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub participant_id: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Created {
    pub session_id: Uuid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guess {
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rating {
    #[serde(default)]
    pub urd: Option<i64>,
}

type Shared = State<Arc<SessionService>>;
type Reply<T> = Result<Json<T>, ApiError>;

pub fn router(service: Arc<SessionService>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/word", get(word))
        .route("/sessions/{id}/guess", post(guess))
        .route("/sessions/{id}/skip", post(skip))
        .route("/sessions/{id}/rating", post(rating))
        .route("/sessions/{id}/summary", get(summary))
        .with_state(service)
}

type Body<T> = Result<Json<T>, JsonRejection>;

async fn create(State(svc): Shared, body: Body<CreateSession>) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(req) = body?;
    let session_id = svc.create(&req.participant_id, req.mode, req.seed)?;
    Ok((StatusCode::CREATED, Json(Created { session_id })))
}

fn session_id(path: Result<Path<Uuid>, PathRejection>) -> Result<Uuid, ApiError> {
    Ok(path?.0)
}

async fn word(State(svc): Shared, id: Result<Path<Uuid>, PathRejection>) -> Reply<WordView> {
    Ok(Json(svc.next_word(session_id(id)?)?))
}

async fn guess(
    State(svc): Shared,
    id: Result<Path<Uuid>, PathRejection>,
    body: Body<Guess>,
) -> Reply<GuessOutcome> {
    let Json(req) = body?;
    Ok(Json(svc.guess(session_id(id)?, &req.text)?))
}

async fn skip(State(svc): Shared, id: Result<Path<Uuid>, PathRejection>) -> Reply<serde_json::Value> {
    svc.skip(session_id(id)?)?;
    Ok(Json(json!({})))
}

async fn rating(
    State(svc): Shared,
    id: Result<Path<Uuid>, PathRejection>,
    body: Bytes,
) -> Reply<RatingOutcome> {
    let id = session_id(id)?;
    // an empty body is a dismissed rating popup
    let rating: Rating = if body.iter().all(u8::is_ascii_whitespace) {
        Rating::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?
    };
    Ok(Json(svc.rate(id, rating.urd)?))
}

async fn summary(State(svc): Shared, id: Result<Path<Uuid>, PathRejection>) -> Reply<Summary> {
    Ok(Json(svc.summary(session_id(id)?)?))
}

/// Serves until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, service: Arc<SessionService>) -> std::io::Result<()> {
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
