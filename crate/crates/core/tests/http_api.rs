//! HTTP API contract tests driven through the router without a socket.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use base64::Engine as _;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use tripminder::gateway::{http, GatewayConfig, ManualClock, Service, API_ERROR_CODES};
use tripminder::tracker::Frame;

const EMAIL: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/fixtures/emails/conference_invite.txt"
));
const TOKEN: &str = "s3cret";

fn config(dir: &Path) -> GatewayConfig {
    let mut config = GatewayConfig::default();
    config.providers.fixture_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    config.service.journal_path = Some(dir.join("trips.jsonl"));
    let script: String = (0..40).map(|i| format!("{i},jacket,0.95\n")).collect();
    std::fs::write(dir.join("detector.csv"), script).unwrap();
    config.tracker.detector_script = Some(dir.join("detector.csv"));
    config
}

fn app(dir: &Path) -> Router {
    let clock = Arc::new(ManualClock::new("2020-11-20T12:00:00Z".parse().unwrap()));
    let service = Service::from_config(&config(dir))
        .unwrap()
        .with_clock(clock);
    http::router(Arc::new(service), Some(TOKEN.into()))
}

async fn send(
    app: &Router,
    method: &str,
    uri: &str,
    body: Option<&str>,
    token: Option<&str>,
) -> (StatusCode, Value) {
    let mut request = Request::builder().method(method).uri(uri);
    if let Some(token) = token {
        request = request.header(header::AUTHORIZATION, format!("Bearer {token}"));
    }
    let request = match body {
        Some(b) => request
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(b.to_owned())),
        None => request.body(Body::empty()),
    }
    .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes)
        .unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into()));
    if !status.is_success() {
        let code = value["code"].as_str().unwrap_or_default();
        assert!(
            API_ERROR_CODES.contains(&code),
            "undocumented error code {code:?}"
        );
    }
    (status, value)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let body = body.map(|b| b.to_string());
    send(app, method, uri, body.as_deref(), Some(TOKEN)).await
}

async fn create(app: &Router) -> String {
    let (status, trip) = call(
        app,
        "POST",
        "/trips",
        Some(json!({ "email_text": EMAIL, "consent": true })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{trip}");
    trip["id"].as_str().unwrap().to_owned()
}

fn encoded(frame: &Frame) -> String {
    base64::engine::general_purpose::STANDARD.encode(frame.to_pnm())
}

fn sharp(index: usize) -> Frame {
    let gray = (0..64)
        .map(|i| if (i / 8 + i % 8) % 2 == 0 { 0 } else { 255 })
        .collect();
    Frame::from_gray(index, 8, 8, gray).unwrap()
}

#[tokio::test]
async fn create_requires_consent() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (status, body) = call(&app, "POST", "/trips", Some(json!({ "email_text": EMAIL }))).await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    assert_eq!(body["code"], "CONSENT_REQUIRED");
    let (_, trips) = call(&app, "GET", "/trips", None).await;
    assert_eq!(trips, json!([]));
}

#[tokio::test]
async fn create_then_get() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app).await;
    let (status, trip) = call(&app, "GET", &format!("/trips/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(trip["itinerary"]["destination"], "Newport");
    assert_eq!(trip["state"], "RECOMMENDED");
    let names: Vec<&str> = trip["recommendations"]["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert_eq!(&names[..3], ["id", "card", "jacket"]);
    assert_eq!(trip["events"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn unknown_trip_and_route() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (status, body) = call(&app, "GET", "/trips/nope", None).await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::NOT_FOUND, Some("TRIP_NOT_FOUND"))
    );
    let (status, body) = call(&app, "GET", "/elsewhere", None).await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::NOT_FOUND, Some("NOT_FOUND"))
    );
}

#[tokio::test]
async fn selection_rejects_unknown_items() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app).await;
    let uri = format!("/trips/{id}/selection");
    let (status, body) = call(
        &app,
        "POST",
        &uri,
        Some(json!({ "items": ["ID", "spaceship"] })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "UNKNOWN_ITEM");
    assert_eq!(body["details"]["items"], json!(["spaceship"]));

    let (status, trip) = call(
        &app,
        "POST",
        &uri,
        Some(json!({ "items": ["ID", "card", "jacket"] })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(trip["state"], "SELECTED");
    assert_eq!(trip["selection"], json!(["ID", "card", "jacket"]));
}

#[tokio::test]
async fn frames_before_selection_is_bad_state() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app).await;
    let (status, body) = call(
        &app,
        "POST",
        &format!("/trips/{id}/frames"),
        Some(json!({ "frames": [encoded(&sharp(0))] })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "BAD_STATE");
}

#[tokio::test]
async fn frames_flow_into_the_alert() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app).await;
    call(
        &app,
        "POST",
        &format!("/trips/{id}/selection"),
        Some(json!({ "items": ["ID", "card", "jacket"] })),
    )
    .await;

    let blurred = Frame::from_gray(0, 8, 8, vec![90; 64]).unwrap();
    let frames_uri = format!("/trips/{id}/frames");
    let (status, progress) = call(
        &app,
        "POST",
        &frames_uri,
        Some(json!({ "frames": vec![encoded(&blurred); 4] })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        (
            progress["accepted"].as_u64(),
            progress["rejected_blur"].as_u64()
        ),
        (Some(0), Some(4))
    );

    let frames: Vec<String> = (0..10).map(|i| encoded(&sharp(i))).collect();
    let (status, progress) =
        call(&app, "POST", &frames_uri, Some(json!({ "frames": frames }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(progress["confirmed"], json!(["jacket"]));

    let (status, body) = call(
        &app,
        "POST",
        &frames_uri,
        Some(json!({ "frames": ["not base64!"] })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");

    let (_, preview) = call(&app, "GET", &format!("/trips/{id}/alert"), None).await;
    assert_eq!(preview["missed"], json!(["ID", "card"]));
    let (status, event) = call(&app, "POST", &format!("/trips/{id}/alert"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(event["payload"], json!(["ID", "card"]));
    let (status, body) = call(&app, "POST", &format!("/trips/{id}/alert"), None).await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::CONFLICT, Some("BAD_STATE"))
    );
}

#[tokio::test]
async fn notifications_fire_once() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = create(&app).await;
    let (_, none) = call(&app, "GET", "/notifications?now=2020-11-24T08:59:59Z", None).await;
    assert_eq!(none["events"], json!([]));
    let (_, first) = call(&app, "GET", "/notifications?now=2020-11-24T09:00:00Z", None).await;
    let events = first["events"].as_array().unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0]["event_id"], format!("{id}:recommend"));
    let (_, again) = call(&app, "GET", "/notifications?now=2020-11-24T10:00:00Z", None).await;
    assert_eq!(again["events"], json!([]));
    let (status, body) = call(&app, "GET", "/notifications?now=yesterday", None).await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("BAD_REQUEST"))
    );
}

#[tokio::test]
async fn token_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (status, body) = send(&app, "GET", "/trips", None, None).await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::UNAUTHORIZED, Some("UNAUTHORIZED"))
    );
    let (status, _) = send(&app, "GET", "/trips", None, Some("wrong")).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, body) = send(&app, "GET", "/healthz", None, None).await;
    assert_eq!((status, body), (StatusCode::OK, Value::String("ok".into())));
}

#[tokio::test]
async fn malformed_json_is_bad_request() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (status, body) = send(
        &app,
        "POST",
        "/trips",
        Some("{\"email_text\": "),
        Some(TOKEN),
    )
    .await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("BAD_REQUEST"))
    );
    let (status, body) = send(
        &app,
        "POST",
        "/trips",
        Some("{\"consent\": true}"),
        Some(TOKEN),
    )
    .await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("BAD_REQUEST"))
    );
}

#[tokio::test]
async fn trips_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let (id, before) = {
        let app = app(dir.path());
        let id = create(&app).await;
        call(
            &app,
            "POST",
            &format!("/trips/{id}/selection"),
            Some(json!({ "items": ["ID", "jacket"] })),
        )
        .await;
        call(
            &app,
            "POST",
            &format!("/trips/{id}/frames"),
            Some(json!({ "frames": [encoded(&sharp(0))] })),
        )
        .await;
        call(&app, "GET", "/notifications?now=2020-11-24T09:30:00Z", None).await;
        let (_, trip) = call(&app, "GET", &format!("/trips/{id}"), None).await;
        (id, trip)
    };
    let app = app(dir.path());
    let (status, after) = call(&app, "GET", &format!("/trips/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
    let (_, again) = call(&app, "GET", "/notifications?now=2020-11-24T09:30:00Z", None).await;
    assert_eq!(again["events"], json!([]));
}
