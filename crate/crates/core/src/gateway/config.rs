use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::itinerary::ItineraryConfig;
use crate::tracker::TrackerConfig;

pub const DEFAULT_SEARCH_ENDPOINT: &str = "https://search.tripminder.test/search";
pub const DEFAULT_FORECAST_ENDPOINT: &str = "https://forecast.tripminder.test/daily";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

/// Environment variable holding the static API bearer token.
pub const API_TOKEN_ENV: &str = "TRIPMINDER_API_TOKEN";
/// Environment variable holding the provider API key (sent as a bearer
/// token on live provider requests).
pub const PROVIDER_KEY_ENV: &str = "TRIPMINDER_PROVIDER_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderMode {
    /// Replay recorded responses from `fixture_dir`.
    #[default]
    Fixture,
    Live,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProvidersConfig {
    pub mode: ProviderMode,
    /// Holds `poi/` and `forecast/` response directories.
    pub fixture_dir: PathBuf,
    pub search_endpoint: String,
    pub forecast_endpoint: String,
    /// Question-answering extractor; the pattern extractor is used when
    /// unset.
    pub extractor_endpoint: Option<String>,
    pub poi_limit: usize,
    pub reviews_per_poi: usize,
}

impl Default for ProvidersConfig {
    fn default() -> Self {
        Self {
            mode: ProviderMode::Fixture,
            fixture_dir: PathBuf::from("fixtures"),
            search_endpoint: DEFAULT_SEARCH_ENDPOINT.into(),
            forecast_endpoint: DEFAULT_FORECAST_ENDPOINT.into(),
            extractor_endpoint: None,
            poi_limit: crate::poi::DEFAULT_POI_LIMIT,
            reviews_per_poi: crate::poi::DEFAULT_REVIEWS_PER_POI,
        }
    }
}

// No deny_unknown_fields here: serde does not support it with flatten.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct TrackerSection {
    #[serde(flatten)]
    pub thresholds: TrackerConfig,
    /// `frame_index,label,confidence` script for the primary detector.
    pub detector_script: Option<PathBuf>,
    /// Same format, for the fallback classifier.
    pub classifier_script: Option<PathBuf>,
    /// Labels the primary detector knows; defaults to the labels in its
    /// script.
    pub known_categories: Option<Vec<String>>,
    pub segment_threshold: u8,
    pub label_synonyms: Option<PathBuf>,
}

impl Default for TrackerSection {
    fn default() -> Self {
        Self {
            thresholds: TrackerConfig::default(),
            detector_script: None,
            classifier_script: None,
            known_categories: None,
            segment_threshold: 128,
            label_synonyms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceSection {
    /// Journal file; state is kept in memory only when unset.
    pub journal_path: Option<PathBuf>,
    pub webhook_url: Option<String>,
    pub listen: String,
}

impl Default for ServiceSection {
    fn default() -> Self {
        Self {
            journal_path: None,
            webhook_url: None,
            listen: DEFAULT_LISTEN.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewayConfig {
    pub providers: ProvidersConfig,
    pub itinerary: ItineraryConfig,
    pub tracker: TrackerSection,
    pub service: ServiceSection,
}

impl GatewayConfig {
    pub fn from_toml(contents: &str) -> Result<Self, String> {
        toml::from_str(contents).map_err(|e| e.to_string())
    }

    /// Loads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let contents =
            std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut config =
            Self::from_toml(&contents).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.providers.fixture_dir);
        for p in [
            &mut self.tracker.detector_script,
            &mut self.tracker.classifier_script,
            &mut self.tracker.label_synonyms,
            &mut self.service.journal_path,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config() {
        let config = GatewayConfig::from_toml(
            r#"
            [providers]
            mode = "live"
            search_endpoint = "https://s.example/search"

            [itinerary]
            utc_offset_minutes = -300
            default_departure_hour = 7

            [tracker]
            delta = 0.6
            detector_script = "scripts/detector.csv"

            [service]
            journal_path = "state/trips.jsonl"
            webhook_url = "https://hooks.example/notify"
            "#,
        )
        .unwrap();
        assert_eq!(config.providers.mode, ProviderMode::Live);
        assert_eq!(config.itinerary.utc_offset_minutes, -300);
        assert_eq!(config.tracker.thresholds.delta, 0.6);
        assert_eq!(config.tracker.thresholds.gamma, 40.0);
        assert!(!config.itinerary.regions.is_empty());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(GatewayConfig::from_toml("[service]\nlisten_on = \"x\"").is_err());
    }

    #[test]
    fn relative_paths_resolve_against_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tripminder.toml");
        std::fs::write(&path, "[service]\njournal_path = \"j.jsonl\"").unwrap();
        let config = GatewayConfig::load(&path).unwrap();
        assert_eq!(
            config.service.journal_path.unwrap(),
            dir.path().join("j.jsonl")
        );
        assert_eq!(config.providers.fixture_dir, dir.path().join("fixtures"));
    }
}
