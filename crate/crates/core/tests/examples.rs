//! Runs every shipped example so they cannot rot.

#[path = "../examples/compare_methods.rs"]
mod compare_methods;

#[test]
fn compare_methods_runs() {
    compare_methods::run_example().unwrap();
}

#[path = "../examples/discover_pois.rs"]
mod discover_pois;

#[test]
fn discover_pois_runs() {
    discover_pois::run_example().unwrap();
}

#[path = "../examples/extract_itinerary.rs"]
mod extract_itinerary;

#[test]
fn extract_itinerary_runs() {
    extract_itinerary::run_example().unwrap();
}

#[path = "../examples/http_api.rs"]
mod http_api;

#[test]
fn http_api_runs() {
    http_api::run_example().unwrap();
}

#[path = "../examples/mine_reviews.rs"]
mod mine_reviews;

#[test]
fn mine_reviews_runs() {
    mine_reviews::run_example().unwrap();
}

#[path = "../examples/packing_tracker.rs"]
mod packing_tracker;

#[test]
fn packing_tracker_runs() {
    packing_tracker::run_example().unwrap();
}

#[path = "../examples/record_fixtures.rs"]
mod record_fixtures;

#[test]
fn record_fixtures_runs() {
    record_fixtures::run_example().unwrap();
}

#[path = "../examples/trip_lifecycle.rs"]
mod trip_lifecycle;

#[test]
fn trip_lifecycle_runs() {
    trip_lifecycle::run_example().unwrap();
}

#[path = "../examples/weather_advice.rs"]
mod weather_advice;

#[test]
fn weather_advice_runs() {
    weather_advice::run_example().unwrap();
}
