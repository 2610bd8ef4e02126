//! JSON HTTP API over [`Service`].

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{ApiError, CreateTripRequest, FramesRequest, SelectionRequest, Service};
use crate::scheduler::NotificationEvent;

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

#[derive(Clone)]
struct AppState {
    service: Arc<Service>,
    token: Option<Arc<str>>,
}

#[derive(Debug, Deserialize)]
struct PollQuery {
    now: Option<DateTime<Utc>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NotificationsResponse {
    pub events: Vec<NotificationEvent>,
}

type ApiResult<T> = Result<T, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

/// Runs blocking service work (provider calls, journal writes) off the
/// async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new("INTERNAL", e.to_string()))?
}

async fn create_trip(
    State(state): State<AppState>,
    payload: Result<Json<CreateTripRequest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let request = body(payload)?;
    let trip = blocking(move || state.service.create_trip(request)).await?;
    Ok((StatusCode::CREATED, Json(trip)))
}

async fn list_trips(State(state): State<AppState>) -> impl IntoResponse {
    Json(state.service.trips())
}

async fn get_trip(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.service.trip(&id)?))
}

async fn post_selection(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<SelectionRequest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let request = body(payload)?;
    Ok(Json(
        blocking(move || state.service.select(&id, request)).await?,
    ))
}

async fn post_frames(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<FramesRequest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let request = body(payload)?;
    Ok(Json(
        blocking(move || state.service.ingest_frames(&id, request)).await?,
    ))
}

async fn get_alert(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.service.alert_preview(&id)?))
}

async fn post_alert(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(
        blocking(move || state.service.finalize_alert(&id)).await?,
    ))
}

async fn poll(
    State(state): State<AppState>,
    query: Result<Query<PollQuery>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let Query(query) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let events = blocking(move || state.service.poll_notifications(query.now)).await?;
    Ok(Json(NotificationsResponse { events }))
}

async fn healthz() -> &'static str {
    "ok"
}

async fn require_token(State(state): State<AppState>, request: Request, next: Next) -> Response {
    if let Some(token) = &state.token {
        let presented = request
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        if presented != Some(token.as_ref()) {
            return ApiError::new("UNAUTHORIZED", "missing or wrong bearer token").into_response();
        }
    }
    next.run(request).await
}

async fn not_found() -> ApiError {
    ApiError::new("NOT_FOUND", "no such route")
}

/// The API router. With a token, every route but `/healthz` requires
/// `Authorization: Bearer <token>`.
pub fn router(service: Arc<Service>, token: Option<String>) -> Router {
    let state = AppState {
        service,
        token: token.map(Into::into),
    };
    let api = Router::new()
        .route("/trips", post(create_trip).get(list_trips))
        .route("/trips/{id}", get(get_trip))
        .route("/trips/{id}/selection", post(post_selection))
        .route("/trips/{id}/frames", post(post_frames))
        .route("/trips/{id}/alert", get(get_alert).post(post_alert))
        .route("/notifications", get(poll))
        .fallback(not_found)
        .route_layer(middleware::from_fn_with_state(state.clone(), require_token));
    Router::new()
        .route("/healthz", get(healthz))
        .merge(api)
        .with_state(state)
}

/// Serves the API until the process is stopped.
pub async fn serve(
    service: Arc<Service>,
    listen: &str,
    token: Option<String>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(listen).await?;
    axum::serve(listener, router(service, token)).await
}
