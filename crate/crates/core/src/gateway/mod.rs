//! Service facade over the whole pipeline, shared by the HTTP API and the
//! command-line client.

mod config;
pub mod http;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard};

use base64::Engine as _;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::{
    GatewayConfig, ProviderMode, ProvidersConfig, ServiceSection, TrackerSection, API_TOKEN_ENV,
    DEFAULT_FORECAST_ENDPOINT, DEFAULT_LISTEN, DEFAULT_SEARCH_ENDPOINT, PROVIDER_KEY_ENV,
};

use crate::itinerary::{
    extract_entities, resolve_itinerary, EmailDocument, EntityTagger, GazetteerTagger, Itinerary,
    ItineraryConfig, ItineraryError,
};
use crate::mining::{
    aggregate_recommendations, email_note_items, review_items, weather_items, MiningError,
    ObjectExtractor, PatternExtractor, RecommendationList, RemoteExtractor, VerbLexicon,
    VerbTagger,
};
use crate::poi::{fetch_pois, PoiError, PoiProvider, WebPoiProvider};
use crate::scheduler::{
    EventKind, NotificationEvent, Scheduler, SchedulerError, TripRecord, TripState,
};
use crate::tracker::{
    load_manifest, parse_script, Backends, Frame, LabelSynonyms, ScriptedClassifier,
    ScriptedDetector, SessionProgress, ThresholdSegmenter, TrackerError,
};
use crate::transport::{FixtureTransport, HttpRequest, LiveTransport, Transport};
use crate::weather::{
    clip_forecast, WeatherError, WeatherProvider, WeatherRules, WebWeatherProvider,
};

/// Every code an API error may carry.
pub const API_ERROR_CODES: &[&str] = &[
    "BAD_REQUEST",
    "UNAUTHORIZED",
    "CONSENT_REQUIRED",
    "EMPTY_DOCUMENT",
    "NO_LOCATION",
    "NO_FUTURE_DATE",
    "INVALID_SPAN",
    "EMPTY_DESTINATION",
    "PROVIDER_UNAVAILABLE",
    "INVALID_FORECAST",
    "TRIP_NOT_FOUND",
    "NOT_FOUND",
    "ALREADY_SCHEDULED",
    "UNKNOWN_ITEM",
    "BAD_STATE",
    "NO_SELECTION",
    "FRAME_TOO_SMALL",
    "MALFORMED_FRAME",
    "DIMENSION_MISMATCH",
    "BACKEND_FAILURE",
    "EXTRACTOR_FAILURE",
    "JOURNAL_FAILURE",
    "INTERNAL",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<BTreeMap<String, Value>>,
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        debug_assert!(API_ERROR_CODES.contains(&code), "undocumented code {code}");
        Self {
            code: code.to_owned(),
            message: message.into(),
            details: None,
        }
    }

    pub fn with_detail(mut self, key: &str, value: Value) -> Self {
        self.details
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_owned(), value);
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new("BAD_REQUEST", message)
    }

    pub fn status(&self) -> u16 {
        match self.code.as_str() {
            "BAD_REQUEST" | "FRAME_TOO_SMALL" | "MALFORMED_FRAME" | "DIMENSION_MISMATCH" => 400,
            "UNAUTHORIZED" => 401,
            "CONSENT_REQUIRED" => 403,
            "TRIP_NOT_FOUND" | "NOT_FOUND" => 404,
            "ALREADY_SCHEDULED" | "BAD_STATE" | "NO_SELECTION" => 409,
            "EMPTY_DOCUMENT" | "NO_LOCATION" | "NO_FUTURE_DATE" | "EMPTY_DESTINATION"
            | "UNKNOWN_ITEM" => 422,
            "PROVIDER_UNAVAILABLE"
            | "INVALID_FORECAST"
            | "BACKEND_FAILURE"
            | "EXTRACTOR_FAILURE"
            | "INVALID_SPAN" => 502,
            _ => 500,
        }
    }
}

impl From<ItineraryError> for ApiError {
    fn from(e: ItineraryError) -> Self {
        ApiError::new(e.code(), e.to_string())
    }
}

impl From<PoiError> for ApiError {
    fn from(e: PoiError) -> Self {
        ApiError::new(e.code(), e.to_string())
    }
}

impl From<WeatherError> for ApiError {
    fn from(e: WeatherError) -> Self {
        match e {
            WeatherError::InvalidForecast { .. } => {
                ApiError::new("INVALID_FORECAST", e.to_string())
            }
            WeatherError::ProviderUnavailable(_) => {
                ApiError::new("PROVIDER_UNAVAILABLE", e.to_string())
            }
            _ => ApiError::new("INTERNAL", e.to_string()),
        }
    }
}

impl From<MiningError> for ApiError {
    fn from(e: MiningError) -> Self {
        ApiError::new("EXTRACTOR_FAILURE", e.to_string())
    }
}

impl From<TrackerError> for ApiError {
    fn from(e: TrackerError) -> Self {
        let err = ApiError::new(
            match e.code() {
                "BAD_CONFIG" => "INTERNAL",
                code => code,
            },
            e.to_string(),
        );
        match e {
            TrackerError::BackendFailure { frame_index, .. } => {
                err.with_detail("frame_index", frame_index.into())
            }
            _ => err,
        }
    }
}

impl From<SchedulerError> for ApiError {
    fn from(e: SchedulerError) -> Self {
        match e {
            SchedulerError::Tracker(t) => t.into(),
            SchedulerError::UnknownItem(ref items) => {
                let items = items.clone();
                ApiError::new("UNKNOWN_ITEM", e.to_string()).with_detail("items", items.into())
            }
            other => ApiError::new(other.code(), other.to_string()),
        }
    }
}

/// Source of the current instant; injectable so tests never sleep.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// A settable clock.
#[derive(Debug)]
pub struct ManualClock(Mutex<DateTime<Utc>>);

impl ManualClock {
    pub fn new(at: DateTime<Utc>) -> Self {
        Self(Mutex::new(at))
    }

    pub fn set(&self, at: DateTime<Utc>) {
        *self.0.lock().expect("clock lock") = at;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        *self.0.lock().expect("clock lock")
    }
}

/// Outbound notification delivery.
pub trait Webhook: Send + Sync {
    fn deliver(&self, event: &NotificationEvent) -> Result<(), String>;
}

/// POSTs each event as JSON. Receivers deduplicate on `event_id`.
pub struct HttpWebhook<T> {
    transport: T,
    url: String,
}

impl<T: Transport> HttpWebhook<T> {
    pub fn new(transport: T, url: impl Into<String>) -> Self {
        Self {
            transport,
            url: url.into(),
        }
    }
}

impl<T: Transport + Send + Sync> Webhook for HttpWebhook<T> {
    fn deliver(&self, event: &NotificationEvent) -> Result<(), String> {
        let body = serde_json::to_string(event).map_err(|e| e.to_string())?;
        let response = self
            .transport
            .send(&HttpRequest::post_json(&self.url, body))
            .map_err(|e| e.to_string())?;
        if response.is_success() {
            Ok(())
        } else {
            Err(format!("webhook returned status {}", response.status))
        }
    }
}

/// The recommendation stages: everything `create_trip` runs before the
/// trip is stored.
pub struct Pipeline {
    pub tagger: Box<dyn EntityTagger + Send + Sync>,
    pub itinerary: ItineraryConfig,
    pub pois: Box<dyn PoiProvider>,
    pub weather: Box<dyn WeatherProvider>,
    pub rules: WeatherRules,
    pub verbs: Box<dyn VerbTagger>,
    pub extractor: Box<dyn ObjectExtractor>,
    pub poi_limit: usize,
    pub reviews_per_poi: usize,
}

impl Pipeline {
    /// Default stages over the given providers.
    pub fn new(pois: Box<dyn PoiProvider>, weather: Box<dyn WeatherProvider>) -> Self {
        Self {
            tagger: Box::new(GazetteerTagger::default()),
            itinerary: ItineraryConfig::default(),
            pois,
            weather,
            rules: WeatherRules::default(),
            verbs: Box::new(VerbLexicon::default()),
            extractor: Box::new(PatternExtractor::default()),
            poi_limit: crate::poi::DEFAULT_POI_LIMIT,
            reviews_per_poi: crate::poi::DEFAULT_REVIEWS_PER_POI,
        }
    }

    pub fn itinerary_for(&self, email: &EmailDocument) -> Result<Itinerary, ApiError> {
        let entities = extract_entities(email, self.tagger.as_ref())?;
        Ok(resolve_itinerary(
            &entities,
            email.received_at(),
            &self.itinerary,
        )?)
    }

    /// Runs every stage. Missing POI results or forecast days leave that
    /// source empty instead of failing the trip.
    pub fn recommend(
        &self,
        email: &EmailDocument,
    ) -> Result<(Itinerary, RecommendationList), ApiError> {
        let itinerary = self.itinerary_for(email)?;
        let pois = match fetch_pois(
            &itinerary.destination,
            self.pois.as_ref(),
            self.poi_limit,
            self.reviews_per_poi,
        ) {
            Ok(pois) => pois,
            Err(PoiError::NoResults(_)) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let forecast = self.weather.forecast(
            &itinerary.destination,
            itinerary.arrival,
            itinerary.departure,
        )?;
        let weather = match clip_forecast(&forecast, &itinerary) {
            Ok(days) => weather_items(&self.rules.recommend(&days)?, &self.rules),
            Err(WeatherError::NoForecast { .. }) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let email_items =
            email_note_items(email.body(), self.verbs.as_ref(), self.extractor.as_ref())?;
        let reviews = review_items(&pois, self.verbs.as_ref(), self.extractor.as_ref())?;
        let list = aggregate_recommendations(email_items, reviews, weather);
        Ok((itinerary, list))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateTripRequest {
    pub email_text: String,
    #[serde(default)]
    pub subject: Option<String>,
    /// Defaults to the service clock.
    #[serde(default)]
    pub received_at: Option<DateTime<Utc>>,
    /// The destination and dates leave the device only with consent.
    #[serde(default)]
    pub consent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRequest {
    pub items: Vec<String>,
}

/// Frames for a packing session: a manifest path on the server, or PNM
/// (P5/P6) files encoded as base64.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FramesRequest {
    Manifest { manifest: String },
    Batch { frames: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventView {
    pub event_id: String,
    pub kind: EventKind,
    pub fire_at: DateTime<Utc>,
    pub fired: bool,
    /// Empty until fired.
    pub payload: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripView {
    pub id: String,
    pub state: TripState,
    pub itinerary: Itinerary,
    pub recommendations: RecommendationList,
    pub selection: Option<Vec<String>>,
    pub progress: Option<SessionProgress>,
    pub events: Vec<EventView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertPreview {
    pub trip_id: String,
    pub state: TripState,
    pub missed: Vec<String>,
}

/// The pipeline, trip store and packing backends behind one facade. All
/// scheduler access goes through a single lock.
pub struct Service {
    pipeline: Pipeline,
    scheduler: Mutex<Scheduler>,
    backends: Mutex<Backends>,
    clock: Arc<dyn Clock>,
    webhook: Option<Box<dyn Webhook>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    // A panic mid-operation cannot leave half-applied state: every change is
    // committed as one journal record.
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl Service {
    pub fn new(pipeline: Pipeline, scheduler: Scheduler, backends: Backends) -> Self {
        Self {
            pipeline,
            scheduler: Mutex::new(scheduler),
            backends: Mutex::new(backends),
            clock: Arc::new(SystemClock),
            webhook: None,
        }
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_webhook(mut self, webhook: Box<dyn Webhook>) -> Self {
        self.webhook = Some(webhook);
        self
    }

    /// Builds the service described by a config file's contents.
    pub fn from_config(config: &GatewayConfig) -> Result<Self, ApiError> {
        let internal = |m: String| ApiError::new("INTERNAL", m);
        let providers = &config.providers;
        let (poi_transport, forecast_transport, extractor_transport): (
            Box<dyn Transport + Send + Sync>,
            Box<dyn Transport + Send + Sync>,
            Box<dyn Transport + Send + Sync>,
        ) = match providers.mode {
            ProviderMode::Fixture => (
                Box::new(FixtureTransport::new(providers.fixture_dir.join("poi"))),
                Box::new(FixtureTransport::new(
                    providers.fixture_dir.join("forecast"),
                )),
                Box::new(FixtureTransport::new(
                    providers.fixture_dir.join("extractor"),
                )),
            ),
            ProviderMode::Live => {
                let live = || match std::env::var(PROVIDER_KEY_ENV) {
                    Ok(key) => {
                        LiveTransport::new().with_header("Authorization", format!("Bearer {key}"))
                    }
                    Err(_) => LiveTransport::new(),
                };
                (Box::new(live()), Box::new(live()), Box::new(live()))
            }
        };
        let mut pipeline = Pipeline::new(
            Box::new(WebPoiProvider::new(
                poi_transport,
                &providers.search_endpoint,
            )),
            Box::new(WebWeatherProvider::new(
                forecast_transport,
                &providers.forecast_endpoint,
            )),
        );
        pipeline.itinerary = config.itinerary.clone();
        pipeline.poi_limit = providers.poi_limit;
        pipeline.reviews_per_poi = providers.reviews_per_poi;
        if let Some(endpoint) = &providers.extractor_endpoint {
            pipeline.extractor = Box::new(RemoteExtractor::new(extractor_transport, endpoint));
        }

        let tracker = &config.tracker;
        tracker.thresholds.validate()?;
        let synonyms = match &tracker.label_synonyms {
            Some(path) => LabelSynonyms::from_list(&read(path)?).map_err(internal)?,
            None => LabelSynonyms::bundled(),
        };
        let scheduler = match &config.service.journal_path {
            Some(path) => Scheduler::with_journal(synonyms, tracker.thresholds, path)?,
            None => Scheduler::new(synonyms, tracker.thresholds),
        };
        let backends = scripted_backends(tracker)?;
        let mut service = Self::new(pipeline, scheduler, backends);
        if let Some(url) = &config.service.webhook_url {
            service = service.with_webhook(Box::new(HttpWebhook::new(LiveTransport::new(), url)));
        }
        Ok(service)
    }

    pub fn now(&self) -> DateTime<Utc> {
        self.clock.now()
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn create_trip(&self, request: CreateTripRequest) -> Result<TripView, ApiError> {
        if !request.consent {
            return Err(ApiError::new(
                "CONSENT_REQUIRED",
                "set consent to true to send the destination and dates to providers",
            ));
        }
        let received_at = request.received_at.unwrap_or_else(|| self.clock.now());
        let mut email = EmailDocument::new(request.email_text, received_at)?;
        if let Some(subject) = request.subject {
            email = email.with_subject(subject);
        }
        let (itinerary, recommendations) = self.pipeline.recommend(&email)?;
        let mut scheduler = lock(&self.scheduler);
        let id = scheduler.create_trip(itinerary, recommendations)?;
        scheduler.schedule_triggers(&id)?;
        Ok(view(&scheduler, scheduler.trip(&id)?))
    }

    pub fn trip(&self, id: &str) -> Result<TripView, ApiError> {
        let scheduler = lock(&self.scheduler);
        Ok(view(&scheduler, scheduler.trip(id)?))
    }

    pub fn trips(&self) -> Vec<TripView> {
        let scheduler = lock(&self.scheduler);
        scheduler.trips().map(|t| view(&scheduler, t)).collect()
    }

    pub fn select(&self, id: &str, request: SelectionRequest) -> Result<TripView, ApiError> {
        let mut scheduler = lock(&self.scheduler);
        scheduler.record_selection(id, request.items)?;
        Ok(view(&scheduler, scheduler.trip(id)?))
    }

    /// Decodes the frames and runs them through the tracker in order. Frame
    /// indices continue from the frames the session has already seen.
    pub fn ingest_frames(
        &self,
        id: &str,
        request: FramesRequest,
    ) -> Result<SessionProgress, ApiError> {
        let first_index = {
            let scheduler = lock(&self.scheduler);
            scheduler
                .trip(id)?
                .session
                .as_ref()
                .map_or(0, |s| s.verdicts().len())
        };
        let frames: Vec<Frame> = match request {
            FramesRequest::Manifest { manifest } => {
                load_manifest(Path::new(&manifest), first_index)?
            }
            FramesRequest::Batch { frames } => frames
                .iter()
                .enumerate()
                .map(|(i, encoded)| {
                    let bytes = base64::engine::general_purpose::STANDARD
                        .decode(encoded.trim())
                        .map_err(|e| ApiError::new("MALFORMED_FRAME", format!("frame {i}: {e}")))?;
                    Ok(Frame::from_pnm(first_index + i, &bytes)?)
                })
                .collect::<Result<_, ApiError>>()?,
        };
        let mut scheduler = lock(&self.scheduler);
        let mut backends = lock(&self.backends);
        Ok(scheduler.ingest_frames(id, &frames, &mut backends)?)
    }

    pub fn alert_preview(&self, id: &str) -> Result<AlertPreview, ApiError> {
        let scheduler = lock(&self.scheduler);
        let trip = scheduler.trip(id)?;
        Ok(AlertPreview {
            trip_id: id.to_owned(),
            state: trip.state,
            missed: scheduler.alert_preview(id)?,
        })
    }

    /// Fires the trip's alert now, ahead of its scheduled time.
    pub fn finalize_alert(&self, id: &str) -> Result<NotificationEvent, ApiError> {
        let event = lock(&self.scheduler).finalize_alert(id)?;
        self.flush_outbox();
        Ok(event)
    }

    /// Fires every event due at `now` (default: the service clock), then
    /// retries outbound delivery of anything not yet delivered.
    pub fn poll_notifications(
        &self,
        now: Option<DateTime<Utc>>,
    ) -> Result<Vec<NotificationEvent>, ApiError> {
        let now = now.unwrap_or_else(|| self.clock.now());
        let events = lock(&self.scheduler).due_events(now)?;
        self.flush_outbox();
        Ok(events)
    }

    /// Delivers pending events through the webhook; returns how many were
    /// acknowledged. Failures stay pending for the next poll.
    pub fn flush_outbox(&self) -> usize {
        let Some(webhook) = &self.webhook else {
            return 0;
        };
        let pending = lock(&self.scheduler).undelivered();
        let mut delivered = 0;
        for event in pending {
            if webhook.deliver(&event).is_ok()
                && lock(&self.scheduler)
                    .mark_delivered(&event.event_id)
                    .is_ok()
            {
                delivered += 1;
            }
        }
        delivered
    }
}

fn read(path: &Path) -> Result<String, ApiError> {
    std::fs::read_to_string(path)
        .map_err(|e| ApiError::new("INTERNAL", format!("{}: {e}", path.display())))
}

/// Scripted detector and classifier from the configured scripts, and a
/// luminance threshold segmenter.
pub fn scripted_backends(tracker: &TrackerSection) -> Result<Backends, ApiError> {
    let script = |path: &Option<std::path::PathBuf>| -> Result<_, ApiError> {
        match path {
            Some(p) => parse_script(&read(p)?).map_err(|e| ApiError::new("INTERNAL", e)),
            None => Ok(Vec::new()),
        }
    };
    let detector = script(&tracker.detector_script)?;
    let known: Vec<String> = match &tracker.known_categories {
        Some(labels) => labels.clone(),
        None => detector.iter().map(|r| r.label.clone()).collect(),
    };
    Ok(Backends {
        primary: Box::new(ScriptedDetector::new(detector, known)),
        segmenter: Box::new(ThresholdSegmenter::new(tracker.segment_threshold)),
        fallback: Box::new(ScriptedClassifier::new(script(&tracker.classifier_script)?)),
    })
}

fn view(scheduler: &Scheduler, trip: &TripRecord) -> TripView {
    TripView {
        id: trip.id.clone(),
        state: trip.state,
        itinerary: trip.itinerary.clone(),
        recommendations: trip.recommendations.clone(),
        selection: trip.selection.clone(),
        progress: trip.session.as_ref().map(|s| s.progress()),
        events: scheduler
            .events_for(&trip.id)
            .into_iter()
            .map(|(e, fired)| EventView {
                event_id: e.event_id,
                kind: e.kind,
                fire_at: e.fire_at,
                fired,
                payload: e.payload,
            })
            .collect(),
    }
}
