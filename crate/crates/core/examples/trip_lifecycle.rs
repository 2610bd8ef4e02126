//! A trip from invitation email to missed-items alert, driven through the
//! service facade with replayed providers and an injected clock.

use std::error::Error;
use std::path::Path;
use std::sync::Arc;

use tripminder::gateway::{
    CreateTripRequest, FramesRequest, GatewayConfig, ManualClock, SelectionRequest, Service,
};
use tripminder::tracker::Frame;

const EMAIL: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/fixtures/emails/conference_invite.txt"
));

fn checkerboard(index: usize) -> Frame {
    let gray = (0..16 * 16)
        .map(|i| if (i / 16 + i % 16) % 2 == 0 { 20 } else { 230 })
        .collect();
    Frame::from_gray(index, 16, 16, gray).expect("valid frame")
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scratch = tempdir()?;
    // Scripted detector: the traveller packs a jacket, a bottle and a cap.
    let script: String = ["jacket", "bottle", "cap"]
        .iter()
        .enumerate()
        .flat_map(|(n, label)| (0..10).map(move |i| format!("{},{label},0.92\n", n * 10 + i)))
        .collect();
    std::fs::write(scratch.join("detector.csv"), script)?;

    let mut config = GatewayConfig::default();
    config.providers.fixture_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    config.tracker.detector_script = Some(scratch.join("detector.csv"));
    config.service.journal_path = Some(scratch.join("trips.jsonl"));

    let clock = Arc::new(ManualClock::new("2020-11-20T12:00:00Z".parse()?));
    let service = Service::from_config(&config)?.with_clock(clock.clone());

    let trip = service.create_trip(CreateTripRequest {
        email_text: EMAIL.into(),
        subject: None,
        received_at: None,
        consent: true,
    })?;
    println!(
        "trip {} to {} on {}, leaving home {}",
        trip.id, trip.itinerary.destination, trip.itinerary.arrival, trip.itinerary.depart_home_at
    );
    for item in &trip.recommendations.items {
        println!("  {:?}: {}", item.source, item.name);
    }

    clock.set("2020-11-24T09:00:00Z".parse()?);
    for event in service.poll_notifications(None)? {
        println!(
            "{:?} at {}: {} items",
            event.kind,
            event.fire_at,
            event.payload.len()
        );
    }

    let selection = ["ID", "card", "jacket", "water", "hat"]
        .map(String::from)
        .to_vec();
    service.select(&trip.id, SelectionRequest { items: selection })?;

    let frames: Vec<String> = (0..30)
        .map(|i| {
            use base64::Engine as _;
            base64::engine::general_purpose::STANDARD.encode(checkerboard(i).to_pnm())
        })
        .collect();
    let progress = service.ingest_frames(&trip.id, FramesRequest::Batch { frames })?;
    println!(
        "packing: {} accepted, {} blurry, confirmed {:?}",
        progress.accepted, progress.rejected_blur, progress.confirmed
    );

    clock.set("2020-11-25T08:00:00Z".parse()?);
    for event in service.poll_notifications(None)? {
        println!(
            "{:?} at {}: missed {:?}",
            event.kind, event.fire_at, event.payload
        );
    }

    // Reopening the journal restores the same trip.
    drop(service);
    let reopened = Service::from_config(&config)?;
    println!("after restart: {:?}", reopened.trip(&trip.id)?.state);
    std::fs::remove_dir_all(scratch)?;
    Ok(())
}

fn tempdir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!(
        "tripminder-lifecycle-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos())
    ));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
