//! The JSON API on an ephemeral port, exercised with plain HTTP requests.

use std::error::Error;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};
use tripminder::gateway::{http, GatewayConfig, ManualClock, Service};
use tripminder::transport::{HttpRequest, LiveTransport, Transport};

const EMAIL: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/fixtures/emails/job_offer.txt"
));

fn call(
    base: &str,
    method: &str,
    path: &str,
    body: Option<Value>,
) -> Result<(u16, Value), Box<dyn Error>> {
    let url = format!("{base}{path}");
    let request = match (method, body) {
        ("GET", _) => HttpRequest::get(url),
        (_, body) => HttpRequest::post_json(url, body.unwrap_or(Value::Null).to_string()),
    };
    let response = LiveTransport::new().send(&request)?;
    Ok((response.status, serde_json::from_str(&response.body)?))
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut config = GatewayConfig::default();
    config.providers.fixture_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let clock = Arc::new(ManualClock::new("2020-10-20T09:00:00Z".parse()?));
    let service = Arc::new(Service::from_config(&config)?.with_clock(clock));

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let base = format!("http://{}", listener.local_addr()?);
    runtime.spawn(async move {
        let _ = axum::serve(listener, http::router(service, None)).await;
    });

    let (status, body) = call(
        &base,
        "POST",
        "/trips",
        Some(json!({ "email_text": EMAIL })),
    )?;
    println!("POST /trips without consent -> {status} {}", body["code"]);

    let (status, trip) = call(
        &base,
        "POST",
        "/trips",
        Some(json!({ "email_text": EMAIL, "consent": true })),
    )?;
    let id = trip["id"].as_str().unwrap_or_default().to_owned();
    println!(
        "POST /trips -> {status}, destination {}",
        trip["itinerary"]["destination"]
    );

    let (status, body) = call(
        &base,
        "POST",
        &format!("/trips/{id}/selection"),
        Some(json!({ "items": ["ID", "passport", "spaceship"] })),
    )?;
    println!(
        "bad selection -> {status} {} {}",
        body["code"], body["details"]["items"]
    );

    let (status, body) = call(
        &base,
        "POST",
        &format!("/trips/{id}/selection"),
        Some(json!({ "items": ["ID", "passport", "umbrella"] })),
    )?;
    println!("selection -> {status} {}", body["selection"]);

    let (_, body) = call(
        &base,
        "GET",
        "/notifications?now=2020-11-05T10:00:00Z",
        None,
    )?;
    for event in body["events"].as_array().into_iter().flatten() {
        println!("event {} {}", event["kind"], event["payload"]);
    }
    runtime.shutdown_background();
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
