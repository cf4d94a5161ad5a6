//! HTTP routes over [`TrialService`].
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/api/participants/{pid}/next` | |
//! | POST | `/api/trials/{id}/click` | `{"element": "n3", "client_time_ms": 1200}` |
//! | POST | `/api/trials/{id}/abandon` | |
//! | GET | `/api/trials/{id}` | |
//!
//! Errors come back as `{"error": code, "message": text}`.

use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::service::{ServiceError, TrialService};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClickRequest {
    pub element: String,
    #[serde(default)]
    pub client_time_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::UnknownTrial(_) | ServiceError::UnknownParticipant(_) | ServiceError::NoMoreTrials(_) => {
                StatusCode::NOT_FOUND
            }
            ServiceError::ClickAfterEnd(_) | ServiceError::TimedOut(_) => StatusCode::CONFLICT,
            ServiceError::BadElement(_) => StatusCode::BAD_REQUEST,
            ServiceError::Generation(_) | ServiceError::Layout(_) | ServiceError::Log(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        let body = ErrorBody {
            error: self.code().to_string(),
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

type Shared = Arc<TrialService>;

pub fn router(service: Shared) -> Router {
    Router::new()
        .route("/api/participants/{pid}/next", get(next))
        .route("/api/trials/{id}", get(trial))
        .route("/api/trials/{id}/click", post(click))
        .route("/api/trials/{id}/abandon", post(abandon))
        .with_state(service)
}

async fn next(State(svc): State<Shared>, Path(pid): Path<usize>) -> Response {
    // generation can take a moment for sparse cells
    match tokio::task::spawn_blocking(move || svc.next_trial(pid)).await {
        Ok(Ok(t)) => Json(t).into_response(),
        Ok(Err(e)) => e.into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn click(State(svc): State<Shared>, Path(id): Path<String>, Json(req): Json<ClickRequest>) -> Response {
    match svc.click(&id, &req.element, req.client_time_ms) {
        Ok(r) => Json(r).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn abandon(State(svc): State<Shared>, Path(id): Path<String>) -> Response {
    match svc.abandon(&id) {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn trial(State(svc): State<Shared>, Path(id): Path<String>) -> Response {
    match svc.trial(&id) {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

/// Closes timed-out trials every `period` until the service is dropped.
pub fn spawn_timeout_sweeper(service: Shared, period: Duration) -> tokio::task::JoinHandle<()> {
    let weak = Arc::downgrade(&service);
    drop(service);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let Some(svc) = weak.upgrade() else { break };
            if let Err(e) = svc.sweep_timeouts() {
                tracing::error!("timeout sweep failed: {e}");
            }
        }
    })
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(service: Shared, addr: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    let sweeper = spawn_timeout_sweeper(service.clone(), Duration::from_secs(1));
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    sweeper.abort();
    Ok(())
}
