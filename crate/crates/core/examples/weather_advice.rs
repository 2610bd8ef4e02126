//! Forecast for the stay and the weather rule engine's packing advice.

use std::error::Error;
use std::path::Path;

use tripminder::gateway::DEFAULT_FORECAST_ENDPOINT;
use tripminder::transport::FixtureTransport;
use tripminder::weather::{clip_forecast, WeatherProvider, WeatherRules, WebWeatherProvider};
use tripminder::{CalendarDate, Itinerary};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/forecast");
    let provider =
        WebWeatherProvider::new(FixtureTransport::new(fixtures), DEFAULT_FORECAST_ENDPOINT);
    let rules = WeatherRules::default();
    for (place, arrival) in [("Newport", "2020-11-25"), ("New York", "2020-11-05")] {
        let arrival: CalendarDate = arrival.parse()?;
        let itinerary = Itinerary {
            destination: place.into(),
            arrival,
            departure: arrival.plus_days(7),
            departure_defaulted: true,
            depart_home_at: arrival
                .naive()
                .and_hms_opt(9, 0, 0)
                .unwrap_or_default()
                .and_utc(),
        };
        let forecast = provider.forecast(place, itinerary.arrival, itinerary.departure)?;
        let stay = clip_forecast(&forecast, &itinerary)?;
        for day in &stay {
            println!(
                "{place} {}: {:.2}..{:.2} F, rain {}%",
                day.date, day.min_temp_f, day.max_temp_f, day.rain_chance_pct
            );
        }
        let advice = rules.recommend(&stay)?;
        let fired: Vec<_> = advice.triggered_rules.iter().map(|r| r.id()).collect();
        println!("  rules {fired:?} -> {:?}", advice.items);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
