//! Places of interest for a destination, replayed from recorded provider
//! responses.

use std::error::Error;
use std::path::Path;

use tripminder::gateway::DEFAULT_SEARCH_ENDPOINT;
use tripminder::poi::{build_poi_query, fetch_pois, PoiProvider, WebPoiProvider};
use tripminder::transport::FixtureTransport;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/poi");
    let provider = WebPoiProvider::new(FixtureTransport::new(fixtures), DEFAULT_SEARCH_ENDPOINT);
    for destination in ["Newport", "New York"] {
        let query = build_poi_query(destination)?;
        let raw = provider.search(&query)?;
        println!("{:?}: {} search results", query.text, raw.len());
        let pois = fetch_pois(destination, &provider, 10, 30)?;
        for (rank, poi) in pois.iter().enumerate() {
            println!(
                "  {:>2}. {} ({} reviews, mentions: {})",
                rank + 1,
                poi.name,
                poi.reviews.len(),
                poi.popular_mentions.join(", ")
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
