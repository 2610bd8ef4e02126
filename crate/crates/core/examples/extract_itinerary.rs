//! Entity tagging and itinerary resolution for the two sample emails.

use std::error::Error;

use chrono::{DateTime, Utc};
use tripminder::itinerary::{
    extract_entities, normalize_dates, resolve_itinerary, EntityClass, GazetteerTagger,
    ItineraryConfig,
};
use tripminder::EmailDocument;

const EMAILS: &[(&str, &str)] = &[
    (
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/emails/conference_invite.txt"
        )),
        "2020-11-20T12:00:00Z",
    ),
    (
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/emails/job_offer.txt"
        )),
        "2020-10-20T09:00:00Z",
    ),
];

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tagger = GazetteerTagger::default();
    // Local time is US Eastern (standard) for both travellers.
    let config = ItineraryConfig {
        utc_offset_minutes: -300,
        ..ItineraryConfig::default()
    };
    for (body, received) in EMAILS {
        let received: DateTime<Utc> = received.parse()?;
        let email = EmailDocument::new(*body, received)?;
        let entities = extract_entities(&email, &tagger)?;
        for class in [
            EntityClass::Location,
            EntityClass::Person,
            EntityClass::Date,
        ] {
            println!("{class:?}: {:?}", entities.surfaces(class));
        }
        println!("dates: {:?}", normalize_dates(&entities, received));
        let itinerary = resolve_itinerary(&entities, received, &config)?;
        println!(
            "-> {} from {} to {}{}, leave home at {}\n",
            itinerary.destination,
            itinerary.arrival,
            itinerary.departure,
            if itinerary.departure_defaulted {
                " (default stay)"
            } else {
                ""
            },
            itinerary.depart_home_at
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
