//! Regenerates the provider fixtures under `fixtures/` from the seed files.
//!
//! Each seed describes what the search, POI page and forecast providers
//! return for one sample email. The example resolves the email's itinerary,
//! issues exactly the requests the pipeline would, and records every
//! response through `RecordingTransport`.
//!
//! `cargo run --example record_fixtures` rewrites `fixtures/poi` and
//! `fixtures/forecast`; as a test it records into a scratch directory and
//! checks the result matches what is checked in.

use std::error::Error;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::Deserialize;
use serde_json::json;
use tripminder::gateway::{DEFAULT_FORECAST_ENDPOINT, DEFAULT_SEARCH_ENDPOINT};
use tripminder::itinerary::{
    extract_entities, resolve_itinerary, GazetteerTagger, ItineraryConfig,
};
use tripminder::poi::{
    build_poi_query, fetch_pois, WebPoiProvider, DEFAULT_POI_LIMIT, DEFAULT_REVIEWS_PER_POI,
};
use tripminder::transport::{HttpRequest, HttpResponse, MemoryTransport, RecordingTransport};
use tripminder::weather::{DailyForecast, WeatherProvider, WebWeatherProvider};
use tripminder::EmailDocument;

#[derive(Deserialize)]
struct Seed {
    email: String,
    received_at: DateTime<Utc>,
    destination: String,
    search_results: Vec<serde_json::Value>,
    pages: Vec<SeedPage>,
    forecast: Vec<DailyForecast>,
}

#[derive(Deserialize)]
struct SeedPage {
    url: String,
    name: String,
    popular_mentions: Vec<String>,
    reviews: Vec<serde_json::Value>,
}

fn fixture_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn record_seed(seed_path: &Path, out: &Path) -> Result<(), Box<dyn Error>> {
    let seed: Seed = serde_json::from_str(&std::fs::read_to_string(seed_path)?)?;
    let body = std::fs::read_to_string(fixture_root().join(&seed.email))?;
    let email = EmailDocument::new(body.trim_end(), seed.received_at)?;
    let entities = extract_entities(&email, &GazetteerTagger::default())?;
    let itinerary = resolve_itinerary(&entities, email.received_at(), &ItineraryConfig::default())?;
    if itinerary.destination != seed.destination {
        return Err(format!(
            "{}: resolved {:?}, seed expects {:?}",
            seed_path.display(),
            itinerary.destination,
            seed.destination
        )
        .into());
    }

    let probe_poi = WebPoiProvider::new(MemoryTransport::new(), DEFAULT_SEARCH_ENDPOINT);
    let probe_weather = WebWeatherProvider::new(MemoryTransport::new(), DEFAULT_FORECAST_ENDPOINT);
    let mut upstream = MemoryTransport::new()
        .route(
            probe_poi.search_request(&build_poi_query(&itinerary.destination)?),
            HttpResponse::ok(serde_json::to_string_pretty(
                &json!({ "results": seed.search_results }),
            )?),
        )
        .route(
            probe_weather.request(
                &itinerary.destination,
                itinerary.arrival,
                itinerary.departure,
            ),
            HttpResponse::ok(serde_json::to_string_pretty(
                &json!({ "daily": seed.forecast }),
            )?),
        );
    for page in &seed.pages {
        let payload = json!({
            "name": page.name,
            "popular_mentions": page.popular_mentions,
            "reviews": page.reviews,
        });
        upstream = upstream.route(
            HttpRequest::get(&page.url),
            HttpResponse::ok(serde_json::to_string_pretty(&payload)?),
        );
    }
    let upstream = Arc::new(upstream);

    let pois = WebPoiProvider::new(
        RecordingTransport::new(upstream.clone(), out.join("poi"))?,
        DEFAULT_SEARCH_ENDPOINT,
    );
    let fetched = fetch_pois(
        &itinerary.destination,
        &pois,
        DEFAULT_POI_LIMIT,
        DEFAULT_REVIEWS_PER_POI,
    )?;
    let weather = WebWeatherProvider::new(
        RecordingTransport::new(upstream.clone(), out.join("forecast"))?,
        DEFAULT_FORECAST_ENDPOINT,
    );
    let days = weather.forecast(
        &itinerary.destination,
        itinerary.arrival,
        itinerary.departure,
    )?;
    println!(
        "{}: {} -> {} POIs, {} forecast days, {} requests recorded",
        seed_path.file_name().unwrap_or_default().to_string_lossy(),
        itinerary.destination,
        fetched.len(),
        days.len(),
        upstream.requests().len()
    );
    Ok(())
}

fn record_all(out: &Path) -> Result<(), Box<dyn Error>> {
    let mut seeds: Vec<PathBuf> = std::fs::read_dir(fixture_root().join("seeds"))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    seeds.sort();
    for seed in seeds {
        record_seed(&seed, out)?;
    }
    Ok(())
}

fn listing(dir: &Path) -> Result<Vec<(String, String)>, Box<dyn Error>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        files.push((
            path.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned(),
            std::fs::read_to_string(&path)?,
        ));
    }
    files.sort();
    Ok(files)
}

/// Records into a scratch directory and compares with the checked-in
/// fixtures.
pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scratch = std::env::temp_dir().join(format!("tripminder-fixtures-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&scratch);
    record_all(&scratch)?;
    for sub in ["poi", "forecast"] {
        if listing(&scratch.join(sub))? != listing(&fixture_root().join(sub))? {
            return Err(format!(
                "fixtures/{sub} is stale; run `cargo run --example record_fixtures`"
            )
            .into());
        }
    }
    std::fs::remove_dir_all(&scratch)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let root = fixture_root();
    for sub in ["poi", "forecast"] {
        let _ = std::fs::remove_dir_all(root.join(sub));
    }
    record_all(&root)
}
