//! Stay-window forecasts and the weather rule engine.
//!
//! Rules look at the whole stay: the lowest daily minimum, the highest daily
//! maximum and the highest rain chance. Thresholds are strict, so a value
//! sitting exactly on 30/50/70 °F or 40 % fires nothing.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data;
use crate::itinerary::{CalendarDate, Itinerary};
use crate::transport::{HttpRequest, Transport, TransportError};

#[derive(Debug, Error)]
pub enum WeatherError {
    #[error("forecast list is empty")]
    EmptyForecast,
    #[error("provider has no forecast between {from} and {to}")]
    NoForecast {
        from: CalendarDate,
        to: CalendarDate,
    },
    #[error("invalid forecast for {date}: {reason}")]
    InvalidForecast { date: CalendarDate, reason: String },
    #[error("weather provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("bad weather rules: {0}")]
    BadRules(String),
}

impl WeatherError {
    pub fn code(&self) -> &'static str {
        match self {
            WeatherError::EmptyForecast => "EMPTY_FORECAST",
            WeatherError::NoForecast { .. } => "NO_FORECAST",
            WeatherError::InvalidForecast { .. } => "PROVIDER_UNAVAILABLE",
            WeatherError::ProviderUnavailable(_) => "PROVIDER_UNAVAILABLE",
            WeatherError::BadRules(_) => "INTERNAL",
        }
    }
}

impl From<TransportError> for WeatherError {
    fn from(e: TransportError) -> Self {
        WeatherError::ProviderUnavailable(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyForecast {
    pub date: CalendarDate,
    pub min_temp_f: f64,
    pub max_temp_f: f64,
    #[serde(default)]
    pub summary: String,
    #[serde(default)]
    pub rain_chance_pct: f64,
}

impl DailyForecast {
    pub fn validate(&self) -> Result<(), WeatherError> {
        let invalid = |reason: &str| WeatherError::InvalidForecast {
            date: self.date,
            reason: reason.to_owned(),
        };
        if self.min_temp_f.is_nan() || self.max_temp_f.is_nan() || self.min_temp_f > self.max_temp_f
        {
            return Err(invalid("min temperature above max"));
        }
        if !(0.0..=100.0).contains(&self.rain_chance_pct) {
            return Err(invalid("rain chance outside 0..=100"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeatherRule {
    MinTempCold,
    MinTempCool,
    MaxTempMild,
    MaxTempHot,
    Rain,
}

impl WeatherRule {
    pub const ALL: [WeatherRule; 5] = [
        WeatherRule::MinTempCold,
        WeatherRule::MinTempCool,
        WeatherRule::MaxTempMild,
        WeatherRule::MaxTempHot,
        WeatherRule::Rain,
    ];

    pub fn id(self) -> &'static str {
        match self {
            WeatherRule::MinTempCold => "MIN_TEMP_COLD",
            WeatherRule::MinTempCool => "MIN_TEMP_COOL",
            WeatherRule::MaxTempMild => "MAX_TEMP_MILD",
            WeatherRule::MaxTempHot => "MAX_TEMP_HOT",
            WeatherRule::Rain => "RAIN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeatherAdvice {
    pub items: Vec<String>,
    pub triggered_rules: Vec<WeatherRule>,
}

/// Item lists per rule, loaded from a `rule id -> [items]` TOML table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeatherRules {
    items: BTreeMap<WeatherRule, Vec<String>>,
}

impl WeatherRules {
    pub fn from_toml(contents: &str) -> Result<Self, WeatherError> {
        let table: BTreeMap<String, Vec<String>> =
            toml::from_str(contents).map_err(|e| WeatherError::BadRules(e.to_string()))?;
        let mut items = BTreeMap::new();
        for rule in WeatherRule::ALL {
            let list = table
                .get(rule.id())
                .ok_or_else(|| WeatherError::BadRules(format!("missing rule {}", rule.id())))?;
            items.insert(rule, list.clone());
        }
        if let Some(unknown) = table
            .keys()
            .find(|k| !WeatherRule::ALL.iter().any(|r| r.id() == k.as_str()))
        {
            return Err(WeatherError::BadRules(format!("unknown rule {unknown}")));
        }
        Ok(Self { items })
    }

    pub fn items(&self, rule: WeatherRule) -> &[String] {
        &self.items[&rule]
    }

    /// Applies the rules to the stay's forecast days.
    pub fn recommend(&self, days: &[DailyForecast]) -> Result<WeatherAdvice, WeatherError> {
        if days.is_empty() {
            return Err(WeatherError::EmptyForecast);
        }
        let t_min = days
            .iter()
            .map(|d| d.min_temp_f)
            .fold(f64::INFINITY, f64::min);
        let t_max = days
            .iter()
            .map(|d| d.max_temp_f)
            .fold(f64::NEG_INFINITY, f64::max);
        let rain = days
            .iter()
            .map(|d| d.rain_chance_pct)
            .fold(f64::NEG_INFINITY, f64::max);

        let mut triggered = Vec::new();
        if t_min < 30.0 {
            triggered.push(WeatherRule::MinTempCold);
        } else if t_min > 30.0 && t_min < 50.0 {
            triggered.push(WeatherRule::MinTempCool);
        }
        if t_max > 50.0 && t_max < 70.0 {
            triggered.push(WeatherRule::MaxTempMild);
        } else if t_max > 70.0 {
            triggered.push(WeatherRule::MaxTempHot);
        }
        if rain > 40.0 {
            triggered.push(WeatherRule::Rain);
        }

        let mut seen = HashSet::new();
        let items = triggered
            .iter()
            .flat_map(|r| self.items(*r).iter())
            .filter(|item| seen.insert(item.to_lowercase()))
            .cloned()
            .collect();
        Ok(WeatherAdvice {
            items,
            triggered_rules: triggered,
        })
    }
}

impl Default for WeatherRules {
    fn default() -> Self {
        Self::from_toml(data::WEATHER_RULES).expect("bundled weather rules are valid")
    }
}

/// [`WeatherRules::recommend`] with the bundled item lists.
pub fn recommend_for_weather(days: &[DailyForecast]) -> Result<WeatherAdvice, WeatherError> {
    WeatherRules::default().recommend(days)
}

/// Days of the provider forecast inside the stay (inclusive on both ends).
pub fn clip_forecast(
    provider_days: &[DailyForecast],
    itinerary: &Itinerary,
) -> Result<Vec<DailyForecast>, WeatherError> {
    let days: Vec<_> = provider_days
        .iter()
        .filter(|d| d.date >= itinerary.arrival && d.date <= itinerary.departure)
        .cloned()
        .collect();
    if days.is_empty() {
        return Err(WeatherError::NoForecast {
            from: itinerary.arrival,
            to: itinerary.departure,
        });
    }
    Ok(days)
}

pub trait WeatherProvider: Send + Sync {
    /// Daily forecasts for `place` between the two dates, sorted by date.
    /// May cover less than the requested range.
    fn forecast(
        &self,
        place: &str,
        from: CalendarDate,
        to: CalendarDate,
    ) -> Result<Vec<DailyForecast>, WeatherError>;
}

#[derive(Debug, Deserialize)]
struct ForecastPayload {
    daily: Vec<DailyForecast>,
}

/// JSON forecast API client: `GET {endpoint}?place=..&start=..&end=..`
/// returning `{"daily": [DailyForecast..]}`.
pub struct WebWeatherProvider<T> {
    transport: T,
    endpoint: String,
}

impl<T: Transport> WebWeatherProvider<T> {
    pub fn new(transport: T, endpoint: impl Into<String>) -> Self {
        Self {
            transport,
            endpoint: endpoint.into(),
        }
    }

    pub fn request(&self, place: &str, from: CalendarDate, to: CalendarDate) -> HttpRequest {
        let params = [
            ("place", place.to_owned()),
            ("start", from.to_string()),
            ("end", to.to_string()),
        ];
        let url = url::Url::parse_with_params(&self.endpoint, &params)
            .map(String::from)
            .unwrap_or_else(|_| format!("{}?place={place}&start={from}&end={to}", self.endpoint));
        HttpRequest::get(url)
    }
}

impl<T: Transport> WeatherProvider for WebWeatherProvider<T> {
    fn forecast(
        &self,
        place: &str,
        from: CalendarDate,
        to: CalendarDate,
    ) -> Result<Vec<DailyForecast>, WeatherError> {
        let request = self.request(place, from, to);
        let response = self.transport.send(&request)?;
        if !response.is_success() {
            return Err(WeatherError::ProviderUnavailable(format!(
                "{} returned status {}",
                request.url, response.status
            )));
        }
        let mut payload: ForecastPayload = serde_json::from_str(&response.body)
            .map_err(|e| WeatherError::ProviderUnavailable(format!("bad forecast payload: {e}")))?;
        for day in &payload.daily {
            day.validate()?;
        }
        payload.daily.sort_by_key(|d| d.date);
        Ok(payload.daily)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn day(date: &str, min: f64, max: f64, rain: f64) -> DailyForecast {
        DailyForecast {
            date: date.parse().unwrap(),
            min_temp_f: min,
            max_temp_f: max,
            summary: String::new(),
            rain_chance_pct: rain,
        }
    }

    fn itinerary(arrival: &str, departure: &str) -> Itinerary {
        Itinerary {
            destination: "Newport".into(),
            arrival: arrival.parse().unwrap(),
            departure: departure.parse().unwrap(),
            departure_defaulted: false,
            depart_home_at: Utc.with_ymd_and_hms(2020, 11, 25, 9, 0, 0).unwrap(),
        }
    }

    #[test]
    fn boundary_values_fire_nothing() {
        let advice = recommend_for_weather(&[day("2020-01-01", 50.0, 50.0, 0.0)]).unwrap();
        assert!(advice.items.is_empty());
        assert!(advice.triggered_rules.is_empty());
        let advice = recommend_for_weather(&[day("2020-01-01", 30.0, 70.0, 40.0)]).unwrap();
        assert!(advice.items.is_empty());
    }

    #[test]
    fn cold_and_mild_and_rain() {
        let advice = recommend_for_weather(&[day("2020-01-01", 20.0, 60.0, 41.0)]).unwrap();
        assert_eq!(
            advice.triggered_rules,
            vec![
                WeatherRule::MinTempCold,
                WeatherRule::MaxTempMild,
                WeatherRule::Rain
            ]
        );
        assert_eq!(
            advice.items,
            vec![
                "boots",
                "thick sweater",
                "a winter coat",
                "shorts",
                "t-shirt",
                "water bottle",
                "Ankle boot",
                "Umbrella",
                "Raincoat"
            ]
        );
    }

    #[test]
    fn empty_forecast_is_an_error() {
        assert!(matches!(
            recommend_for_weather(&[]),
            Err(WeatherError::EmptyForecast)
        ));
    }

    #[test]
    fn clipping_keeps_stay_days_only() {
        let days = vec![
            day("2020-11-24", 30.0, 40.0, 0.0),
            day("2020-11-25", 35.16, 42.6, 17.0),
            day("2020-11-26", 34.79, 42.22, 17.0),
            day("2020-11-27", 34.42, 41.85, 17.0),
        ];
        let clipped = clip_forecast(&days, &itinerary("2020-11-25", "2020-12-02")).unwrap();
        assert_eq!(clipped.len(), 3);
        let one = clip_forecast(&days, &itinerary("2020-11-26", "2020-11-26")).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(
            clip_forecast(&days, &itinerary("2020-12-01", "2020-12-08")),
            Err(WeatherError::NoForecast { .. })
        ));
    }

    #[test]
    fn rules_file_must_name_every_rule() {
        assert!(WeatherRules::from_toml("RAIN = [\"x\"]").is_err());
        let mut text = data::WEATHER_RULES.to_owned();
        text.push_str("\nSNOW = [\"sled\"]\n");
        assert!(WeatherRules::from_toml(&text).is_err());
    }

    #[test]
    fn invalid_provider_days_are_rejected() {
        assert!(day("2020-01-01", 50.0, 40.0, 0.0).validate().is_err());
        assert!(day("2020-01-01", 40.0, 50.0, 140.0).validate().is_err());
        assert!(day("2020-01-01", 40.0, 50.0, 100.0).validate().is_ok());
    }
}
