use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use orderopt::Sign3;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::session::{ComparisonQuery, SessionState, SessionTrace};
use crate::spec::SessionSpec;
use crate::store::SessionStore;
use crate::SessionError;

/// Which candidate the human liked better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preference {
    A,
    B,
    #[serde(rename = "TIE")]
    Tie,
}

impl Preference {
    /// A preferred means `f(A) < f(B)`, i.e. compare(A, B) = −1.
    pub fn to_sign(self) -> Sign3 {
        match self {
            Preference::A => Sign3::Minus,
            Preference::B => Sign3::Plus,
            Preference::Tie => Sign3::Zero,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnswerRequest {
    pub query_id: String,
    pub preference: Preference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
}

impl IntoResponse for SessionError {
    fn into_response(self) -> Response {
        let (code, body) = match &self {
            SessionError::InvalidSpec(fields) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "invalid session spec", "fields": fields}),
            ),
            SessionError::NotFound(_) => (StatusCode::NOT_FOUND, json!({"error": self.to_string()})),
            SessionError::StaleQuery { expected, .. } => (
                StatusCode::CONFLICT,
                json!({"error": self.to_string(), "pending_query_id": expected}),
            ),
            SessionError::Finished(state) => (
                StatusCode::CONFLICT,
                json!({"error": self.to_string(), "state": state}),
            ),
            SessionError::NothingToUndo => (StatusCode::CONFLICT, json!({"error": self.to_string()})),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": self.to_string()})),
        };
        (code, Json(body)).into_response()
    }
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/trace", get(trace))
        .route("/sessions/{id}/state", get(state))
        .with_state(store)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    store: Arc<SessionStore>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(store)).with_graceful_shutdown(shutdown).await
}

type Store = State<Arc<SessionStore>>;

async fn create(State(store): Store, Json(spec): Json<SessionSpec>) -> Result<(StatusCode, Json<Created>), SessionError> {
    let s = store.create(spec)?;
    let session_id = s.lock().await.id().to_owned();
    Ok((StatusCode::CREATED, Json(Created { session_id })))
}

async fn query(State(store): Store, Path(id): Path<String>) -> Result<Json<ComparisonQuery>, SessionError> {
    let s = store.get(&id)?;
    let q = s.lock().await.next_query()?;
    Ok(Json(q))
}

async fn answer(
    State(store): Store,
    Path(id): Path<String>,
    Json(req): Json<AnswerRequest>,
) -> Result<Json<SessionState>, SessionError> {
    let s = store.get(&id)?;
    let st = s.lock().await.submit_answer(&req.query_id, req.preference.to_sign())?;
    Ok(Json(st))
}

async fn undo(State(store): Store, Path(id): Path<String>) -> Result<Json<SessionState>, SessionError> {
    let s = store.get(&id)?;
    let st = s.lock().await.undo()?;
    Ok(Json(st))
}

async fn trace(State(store): Store, Path(id): Path<String>) -> Result<Json<SessionTrace>, SessionError> {
    let s = store.get(&id)?;
    let t = s.lock().await.trace();
    Ok(Json(t))
}

async fn state(State(store): Store, Path(id): Path<String>) -> Result<Json<SessionState>, SessionError> {
    let s = store.get(&id)?;
    let st = s.lock().await.state();
    Ok(Json(st))
}
