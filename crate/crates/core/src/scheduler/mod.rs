//! Trip lifecycle and the two time-based notifications: the recommendation
//! push a day before leaving home and the missed-items alert an hour before.

mod journal;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use journal::{Journal, JournalRecord};

use crate::itinerary::Itinerary;
use crate::mining::RecommendationList;
use crate::text::normalize_name;
use crate::tracker::{
    missed_items, Backends, Frame, LabelSynonyms, PackingSession, SessionProgress, TrackerConfig,
    TrackerError,
};

pub const RECOMMEND_LEAD: Duration = Duration::hours(24);
pub const ALERT_LEAD: Duration = Duration::hours(1);

#[derive(Debug, Error)]
pub enum SchedulerError {
    #[error("trip {0} not found")]
    TripNotFound(String),
    #[error("triggers for trip {0} are already scheduled")]
    AlreadyScheduled(String),
    #[error("items not in the recommendation list: {}", .0.join(", "))]
    UnknownItem(Vec<String>),
    #[error("cannot {op} while trip is {state:?}")]
    BadState { state: TripState, op: &'static str },
    #[error("trip {0} has no selection")]
    NoSelection(String),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error("journal: {0}")]
    Journal(String),
}

impl SchedulerError {
    pub fn code(&self) -> &'static str {
        match self {
            SchedulerError::TripNotFound(_) => "TRIP_NOT_FOUND",
            SchedulerError::AlreadyScheduled(_) => "ALREADY_SCHEDULED",
            SchedulerError::UnknownItem(_) => "UNKNOWN_ITEM",
            SchedulerError::BadState { .. } => "BAD_STATE",
            SchedulerError::NoSelection(_) => "NO_SELECTION",
            SchedulerError::Tracker(e) => e.code(),
            SchedulerError::Journal(_) => "JOURNAL_FAILURE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TripState {
    Created,
    Recommended,
    Selected,
    Packing,
    Alerted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    Recommend,
    Alert,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotificationEvent {
    /// Stable id, usable as an idempotency key by receivers.
    pub event_id: String,
    pub trip_id: String,
    pub kind: EventKind,
    pub fire_at: DateTime<Utc>,
    pub payload: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub id: String,
    pub itinerary: Itinerary,
    pub recommendations: RecommendationList,
    pub selection: Option<Vec<String>>,
    pub session: Option<PackingSession>,
    pub state: TripState,
}

impl PartialEq for PackingSession {
    fn eq(&self, other: &Self) -> bool {
        self.config() == other.config() && self.verdicts() == other.verdicts()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ScheduledEvent {
    event_id: String,
    trip_id: String,
    kind: EventKind,
    fire_at: DateTime<Utc>,
    fired: Option<Vec<String>>,
    delivered: bool,
}

impl ScheduledEvent {
    fn to_event(&self, payload: Vec<String>) -> NotificationEvent {
        NotificationEvent {
            event_id: self.event_id.clone(),
            trip_id: self.trip_id.clone(),
            kind: self.kind,
            fire_at: self.fire_at,
            payload,
        }
    }
}

/// `(RECOMMEND, ALERT)` fire instants for a departure time.
pub fn trigger_times(depart_home_at: DateTime<Utc>) -> (DateTime<Utc>, DateTime<Utc>) {
    (depart_home_at - RECOMMEND_LEAD, depart_home_at - ALERT_LEAD)
}

/// In-memory trip store with optional journal persistence. Not internally
/// synchronized; callers share it behind a lock.
#[derive(Debug)]
pub struct Scheduler {
    trips: BTreeMap<String, TripRecord>,
    events: Vec<ScheduledEvent>,
    synonyms: LabelSynonyms,
    tracker: TrackerConfig,
    journal: Option<Journal>,
}

impl Scheduler {
    pub fn new(synonyms: LabelSynonyms, tracker: TrackerConfig) -> Self {
        Self {
            trips: BTreeMap::new(),
            events: Vec::new(),
            synonyms,
            tracker,
            journal: None,
        }
    }

    /// Opens a journal and replays it to rebuild state.
    pub fn with_journal(
        synonyms: LabelSynonyms,
        tracker: TrackerConfig,
        path: &Path,
    ) -> Result<Self, SchedulerError> {
        let (journal, records) = Journal::open(path)?;
        let mut scheduler = Self::new(synonyms, tracker);
        for record in records {
            scheduler.apply(record)?;
        }
        scheduler.journal = Some(journal);
        Ok(scheduler)
    }

    fn commit(&mut self, record: JournalRecord) -> Result<(), SchedulerError> {
        if let Some(journal) = &mut self.journal {
            journal.append(&record)?;
        }
        self.apply(record)
    }

    fn apply(&mut self, record: JournalRecord) -> Result<(), SchedulerError> {
        match record {
            JournalRecord::TripCreated {
                trip_id,
                itinerary,
                recommendations,
            } => {
                self.trips.insert(
                    trip_id.clone(),
                    TripRecord {
                        id: trip_id,
                        itinerary,
                        recommendations,
                        selection: None,
                        session: None,
                        state: TripState::Created,
                    },
                );
            }
            JournalRecord::Scheduled { trip_id, events } => {
                self.trip_mut(&trip_id)?.state = TripState::Recommended;
                for (event_id, kind, fire_at) in events {
                    self.events.push(ScheduledEvent {
                        event_id,
                        trip_id: trip_id.clone(),
                        kind,
                        fire_at,
                        fired: None,
                        delivered: false,
                    });
                }
            }
            JournalRecord::Selected { trip_id, items } => {
                let trip = self.trip_mut(&trip_id)?;
                trip.selection = Some(items);
                trip.state = TripState::Selected;
            }
            JournalRecord::PackingStarted { trip_id, config } => {
                let trip = self.trip_mut(&trip_id)?;
                trip.session = Some(PackingSession::new(config)?);
                trip.state = TripState::Packing;
            }
            JournalRecord::PackingProgress { trip_id, verdicts } => {
                let trip = self.trip_mut(&trip_id)?;
                let session = trip.session.as_mut().ok_or_else(|| {
                    SchedulerError::Journal(format!("progress before packing start for {trip_id}"))
                })?;
                for v in verdicts {
                    session.record(v);
                }
            }
            JournalRecord::Fired {
                event_id,
                payload,
                alerted,
            } => {
                let event = self.event_mut(&event_id)?;
                event.fired = Some(payload);
                let trip_id = event.trip_id.clone();
                if alerted {
                    self.trip_mut(&trip_id)?.state = TripState::Alerted;
                }
            }
            JournalRecord::Alerted { trip_id } => {
                self.trip_mut(&trip_id)?.state = TripState::Alerted;
            }
            JournalRecord::Delivered { event_id } => {
                self.event_mut(&event_id)?.delivered = true;
            }
        }
        Ok(())
    }

    fn trip_mut(&mut self, id: &str) -> Result<&mut TripRecord, SchedulerError> {
        self.trips
            .get_mut(id)
            .ok_or_else(|| SchedulerError::TripNotFound(id.to_owned()))
    }

    fn event_mut(&mut self, event_id: &str) -> Result<&mut ScheduledEvent, SchedulerError> {
        self.events
            .iter_mut()
            .find(|e| e.event_id == event_id)
            .ok_or_else(|| SchedulerError::Journal(format!("unknown event {event_id}")))
    }

    pub fn trip(&self, id: &str) -> Result<&TripRecord, SchedulerError> {
        self.trips
            .get(id)
            .ok_or_else(|| SchedulerError::TripNotFound(id.to_owned()))
    }

    pub fn trips(&self) -> impl Iterator<Item = &TripRecord> {
        self.trips.values()
    }

    pub fn tracker_config(&self) -> &TrackerConfig {
        &self.tracker
    }

    /// Stores a new trip in CREATED state and returns its id.
    pub fn create_trip(
        &mut self,
        itinerary: Itinerary,
        recommendations: RecommendationList,
    ) -> Result<String, SchedulerError> {
        let trip_id = uuid::Uuid::new_v4().to_string();
        self.commit(JournalRecord::TripCreated {
            trip_id: trip_id.clone(),
            itinerary,
            recommendations,
        })?;
        Ok(trip_id)
    }

    /// Creates the RECOMMEND and ALERT events and moves the trip to
    /// RECOMMENDED. Events whose time has already passed fire on the next
    /// poll.
    pub fn schedule_triggers(
        &mut self,
        trip_id: &str,
    ) -> Result<Vec<NotificationEvent>, SchedulerError> {
        let trip = self.trip(trip_id)?;
        if self.events.iter().any(|e| e.trip_id == trip_id) {
            return Err(SchedulerError::AlreadyScheduled(trip_id.to_owned()));
        }
        if trip.state != TripState::Created {
            return Err(SchedulerError::BadState {
                state: trip.state,
                op: "schedule triggers",
            });
        }
        let (recommend_at, alert_at) = trigger_times(trip.itinerary.depart_home_at);
        let recommend_payload: Vec<String> = trip
            .recommendations
            .names()
            .into_iter()
            .map(str::to_owned)
            .collect();
        let events = vec![
            (
                format!("{trip_id}:recommend"),
                EventKind::Recommend,
                recommend_at,
            ),
            (format!("{trip_id}:alert"), EventKind::Alert, alert_at),
        ];
        self.commit(JournalRecord::Scheduled {
            trip_id: trip_id.to_owned(),
            events: events.clone(),
        })?;
        Ok(events
            .into_iter()
            .map(|(event_id, kind, fire_at)| NotificationEvent {
                event_id,
                trip_id: trip_id.to_owned(),
                kind,
                fire_at,
                // The alert payload is only known at fire time.
                payload: match kind {
                    EventKind::Recommend => recommend_payload.clone(),
                    EventKind::Alert => Vec::new(),
                },
            })
            .collect())
    }

    /// Stores the pruned list verbatim. Re-selection is allowed until
    /// packing starts.
    pub fn record_selection(
        &mut self,
        trip_id: &str,
        items: Vec<String>,
    ) -> Result<&TripRecord, SchedulerError> {
        let trip = self.trip(trip_id)?;
        if !matches!(trip.state, TripState::Recommended | TripState::Selected) {
            return Err(SchedulerError::BadState {
                state: trip.state,
                op: "record a selection",
            });
        }
        let unknown: Vec<String> = items
            .iter()
            .filter(|i| !trip.recommendations.contains(i))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(SchedulerError::UnknownItem(unknown));
        }
        let mut seen = BTreeSet::new();
        let items = items
            .into_iter()
            .filter(|i| seen.insert(normalize_name(i)))
            .collect();
        self.commit(JournalRecord::Selected {
            trip_id: trip_id.to_owned(),
            items,
        })?;
        self.trip(trip_id)
    }

    /// Runs frames through the packing tracker in order.
    pub fn ingest_frames(
        &mut self,
        trip_id: &str,
        frames: &[Frame],
        backends: &mut Backends,
    ) -> Result<SessionProgress, SchedulerError> {
        let trip = self.trip(trip_id)?;
        if !matches!(trip.state, TripState::Selected | TripState::Packing) {
            return Err(SchedulerError::BadState {
                state: trip.state,
                op: "ingest frames",
            });
        }
        if trip.session.is_none() {
            self.commit(JournalRecord::PackingStarted {
                trip_id: trip_id.to_owned(),
                config: self.tracker,
            })?;
        }
        let mut scratch = self
            .trip(trip_id)?
            .session
            .clone()
            .expect("session started");
        let result = scratch.ingest(frames, backends);
        // Verdicts before a failing frame are kept.
        let before = self
            .trip(trip_id)?
            .session
            .as_ref()
            .map_or(0, |s| s.verdicts().len());
        let verdicts = scratch.verdicts()[before..].to_vec();
        if !verdicts.is_empty() {
            self.commit(JournalRecord::PackingProgress {
                trip_id: trip_id.to_owned(),
                verdicts,
            })?;
        }
        result?;
        Ok(self.progress(trip_id)?.expect("session started"))
    }

    pub fn progress(&self, trip_id: &str) -> Result<Option<SessionProgress>, SchedulerError> {
        Ok(self
            .trip(trip_id)?
            .session
            .as_ref()
            .map(PackingSession::progress))
    }

    /// Missed items for a trip right now, without changing state.
    pub fn alert_preview(&self, trip_id: &str) -> Result<Vec<String>, SchedulerError> {
        let trip = self.trip(trip_id)?;
        let selection = trip
            .selection
            .as_ref()
            .ok_or_else(|| SchedulerError::NoSelection(trip_id.to_owned()))?;
        Ok(self.missed(trip, selection))
    }

    fn missed(&self, trip: &TripRecord, selection: &[String]) -> Vec<String> {
        let empty = BTreeSet::new();
        let confirmed = trip.session.as_ref().map_or(&empty, |s| s.confirmed());
        missed_items(selection, confirmed, &self.synonyms)
    }

    fn alert_payload(&self, trip: &TripRecord) -> (Vec<String>, bool) {
        match &trip.selection {
            Some(selection) => (self.missed(trip, selection), true),
            // Nothing was pruned: remind about the whole list.
            None => (
                trip.recommendations
                    .names()
                    .into_iter()
                    .map(str::to_owned)
                    .collect(),
                false,
            ),
        }
    }

    /// Fires the trip's ALERT now and moves it to ALERTED. A SELECTED trip
    /// passes through PACKING with an empty session.
    pub fn finalize_alert(&mut self, trip_id: &str) -> Result<NotificationEvent, SchedulerError> {
        let trip = self.trip(trip_id)?;
        if trip.selection.is_none() {
            return Err(SchedulerError::NoSelection(trip_id.to_owned()));
        }
        if trip.state == TripState::Alerted {
            return Err(SchedulerError::BadState {
                state: trip.state,
                op: "finalize the alert",
            });
        }
        let (payload, _) = self.alert_payload(trip);
        let event = self
            .events
            .iter()
            .find(|e| e.trip_id == trip_id && e.kind == EventKind::Alert)
            .cloned();
        match event {
            Some(e) if e.fired.is_none() => {
                self.commit(JournalRecord::Fired {
                    event_id: e.event_id.clone(),
                    payload: payload.clone(),
                    alerted: true,
                })?;
                Ok(e.to_event(payload))
            }
            other => {
                self.commit(JournalRecord::Alerted {
                    trip_id: trip_id.to_owned(),
                })?;
                let fire_at =
                    other.map_or(self.trip(trip_id)?.itinerary.depart_home_at, |e| e.fire_at);
                Ok(NotificationEvent {
                    event_id: format!("{trip_id}:alert"),
                    trip_id: trip_id.to_owned(),
                    kind: EventKind::Alert,
                    fire_at,
                    payload,
                })
            }
        }
    }

    /// Fires every unfired event due at `now`, each exactly once, ordered by
    /// fire time.
    pub fn due_events(
        &mut self,
        now: DateTime<Utc>,
    ) -> Result<Vec<NotificationEvent>, SchedulerError> {
        let mut due: Vec<ScheduledEvent> = self
            .events
            .iter()
            .filter(|e| e.fired.is_none() && e.fire_at <= now)
            .cloned()
            .collect();
        due.sort_by(|a, b| (a.fire_at, &a.event_id).cmp(&(b.fire_at, &b.event_id)));
        let mut fired = Vec::with_capacity(due.len());
        for e in due {
            let trip = self.trip(&e.trip_id)?;
            let (payload, alerted) = match e.kind {
                EventKind::Recommend => (
                    trip.recommendations
                        .names()
                        .into_iter()
                        .map(str::to_owned)
                        .collect(),
                    false,
                ),
                EventKind::Alert => {
                    let (payload, has_selection) = self.alert_payload(trip);
                    (payload, has_selection && trip.state != TripState::Alerted)
                }
            };
            self.commit(JournalRecord::Fired {
                event_id: e.event_id.clone(),
                payload: payload.clone(),
                alerted,
            })?;
            fired.push(e.to_event(payload));
        }
        Ok(fired)
    }

    /// Fired events not yet acknowledged by the outbound webhook.
    pub fn undelivered(&self) -> Vec<NotificationEvent> {
        let mut out: Vec<_> = self
            .events
            .iter()
            .filter(|e| !e.delivered)
            .filter_map(|e| e.fired.clone().map(|p| e.to_event(p)))
            .collect();
        out.sort_by(|a, b| (a.fire_at, &a.event_id).cmp(&(b.fire_at, &b.event_id)));
        out
    }

    pub fn mark_delivered(&mut self, event_id: &str) -> Result<(), SchedulerError> {
        self.commit(JournalRecord::Delivered {
            event_id: event_id.to_owned(),
        })
    }

    /// Scheduled events of a trip with their payload if already fired.
    pub fn events_for(&self, trip_id: &str) -> Vec<(NotificationEvent, bool)> {
        self.events
            .iter()
            .filter(|e| e.trip_id == trip_id)
            .map(|e| {
                (
                    e.to_event(e.fired.clone().unwrap_or_default()),
                    e.fired.is_some(),
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itinerary::CalendarDate;
    use crate::mining::{RecommendedItem, Source};
    use crate::tracker::{Backend, Detection, FrameStatus, FrameVerdict};

    fn at(s: &str) -> DateTime<Utc> {
        s.parse().unwrap()
    }

    fn itinerary() -> Itinerary {
        Itinerary {
            destination: "Newport".into(),
            arrival: "2020-11-25".parse::<CalendarDate>().unwrap(),
            departure: "2020-12-02".parse().unwrap(),
            departure_defaulted: true,
            depart_home_at: at("2020-11-25T09:00:00Z"),
        }
    }

    fn recommendations() -> RecommendationList {
        let mut items: Vec<_> = ["id", "card", "jacket"]
            .iter()
            .map(|n| RecommendedItem::new(n, Source::EmailNote, "note"))
            .collect();
        items.extend(
            ["water", "hat", "shoes"]
                .iter()
                .map(|n| RecommendedItem::new(n, Source::Review, "review")),
        );
        RecommendationList::from_items(items)
    }

    fn scheduled() -> (Scheduler, String) {
        let mut s = Scheduler::new(LabelSynonyms::bundled(), TrackerConfig::default());
        let id = s.create_trip(itinerary(), recommendations()).unwrap();
        s.schedule_triggers(&id).unwrap();
        (s, id)
    }

    fn accepted(label: &str) -> FrameVerdict {
        FrameVerdict {
            frame_index: 0,
            status: FrameStatus::PrimaryAccept,
            detection: Some(Detection {
                label: label.into(),
                confidence: 0.9,
                backend: Backend::Primary,
            }),
            blur_score: 100.0,
        }
    }

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn trigger_arithmetic() {
        let (s, id) = scheduled();
        let events = s.events_for(&id);
        assert_eq!(events[0].0.fire_at, at("2020-11-24T09:00:00Z"));
        assert_eq!(events[1].0.fire_at, at("2020-11-25T08:00:00Z"));
        assert_eq!(s.trip(&id).unwrap().state, TripState::Recommended);
    }

    #[test]
    fn schedule_twice_is_rejected() {
        let (mut s, id) = scheduled();
        assert_eq!(
            s.schedule_triggers(&id).unwrap_err().code(),
            "ALREADY_SCHEDULED"
        );
    }

    #[test]
    fn exactly_once_polling() {
        let (mut s, id) = scheduled();
        assert!(s.due_events(at("2020-11-24T08:59:59Z")).unwrap().is_empty());
        let first = s.due_events(at("2020-11-24T09:00:00Z")).unwrap();
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].kind, EventKind::Recommend);
        assert_eq!(
            first[0].payload,
            strings(&["id", "card", "jacket", "water", "hat", "shoes"])
        );
        assert!(s.due_events(at("2020-11-24T09:00:00Z")).unwrap().is_empty());
        s.record_selection(&id, strings(&["ID", "card"])).unwrap();
        let alert = s.due_events(at("2021-01-01T00:00:00Z")).unwrap();
        assert_eq!(alert.len(), 1);
        assert_eq!(alert[0].payload, strings(&["ID", "card"]));
        assert_eq!(s.trip(&id).unwrap().state, TripState::Alerted);
    }

    #[test]
    fn selection_rules() {
        let (mut s, id) = scheduled();
        match s.record_selection(&id, strings(&["spaceship", "hat"])) {
            Err(SchedulerError::UnknownItem(bad)) => assert_eq!(bad, strings(&["spaceship"])),
            other => panic!("unexpected {other:?}"),
        }
        let trip = s
            .record_selection(&id, strings(&["ID", "card", "jacket", "water", "hat"]))
            .unwrap();
        assert_eq!(
            trip.selection.as_deref(),
            Some(&strings(&["ID", "card", "jacket", "water", "hat"])[..])
        );
        assert_eq!(trip.state, TripState::Selected);
        assert_eq!(
            s.record_selection("nope", vec![]).unwrap_err().code(),
            "TRIP_NOT_FOUND"
        );
    }

    #[test]
    fn finalize_uses_confirmed_labels() {
        let (mut s, id) = scheduled();
        s.record_selection(&id, strings(&["ID", "card", "jacket", "water", "hat"]))
            .unwrap();
        assert_eq!(s.alert_preview(&id).unwrap().len(), 5);
        let trip = s.trip_mut(&id).unwrap();
        let mut session = PackingSession::new(TrackerConfig::default()).unwrap();
        for label in ["jacket", "bottle", "cap"] {
            for _ in 0..8 {
                session.record(accepted(label));
            }
        }
        trip.session = Some(session);
        trip.state = TripState::Packing;
        let event = s.finalize_alert(&id).unwrap();
        assert_eq!(event.payload, strings(&["ID", "card"]));
        assert_eq!(s.trip(&id).unwrap().state, TripState::Alerted);
        // The scheduled alert already fired through finalize.
        assert!(s
            .due_events(at("2021-01-01T00:00:00Z"))
            .unwrap()
            .iter()
            .all(|e| e.kind != EventKind::Alert));
        assert_eq!(s.finalize_alert(&id).unwrap_err().code(), "BAD_STATE");
    }

    #[test]
    fn finalize_without_selection_or_frames() {
        let (mut s, id) = scheduled();
        assert_eq!(s.finalize_alert(&id).unwrap_err().code(), "NO_SELECTION");
        s.record_selection(&id, vec![]).unwrap();
        assert!(s.finalize_alert(&id).unwrap().payload.is_empty());
    }

    #[test]
    fn unpruned_alert_reminds_everything() {
        let (mut s, id) = scheduled();
        let events = s.due_events(at("2021-01-01T00:00:00Z")).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[1].payload.len(), 6);
        assert_eq!(s.trip(&id).unwrap().state, TripState::Recommended);
    }

    #[test]
    fn state_never_reverses() {
        let (mut s, id) = scheduled();
        s.record_selection(&id, strings(&["hat"])).unwrap();
        s.finalize_alert(&id).unwrap();
        assert_eq!(
            s.record_selection(&id, vec![]).unwrap_err().code(),
            "BAD_STATE"
        );
        let mut backends = Backends {
            primary: Box::new(crate::tracker::ScriptedDetector::new(vec![], [])),
            segmenter: Box::new(crate::tracker::ThresholdSegmenter::new(1)),
            fallback: Box::new(crate::tracker::ScriptedClassifier::new(vec![])),
        };
        assert_eq!(
            s.ingest_frames(&id, &[], &mut backends).unwrap_err().code(),
            "BAD_STATE"
        );
    }

    #[test]
    fn journal_replay_restores_state() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trips.jsonl");
        let id;
        let before;
        {
            let mut s =
                Scheduler::with_journal(LabelSynonyms::bundled(), TrackerConfig::default(), &path)
                    .unwrap();
            id = s.create_trip(itinerary(), recommendations()).unwrap();
            s.schedule_triggers(&id).unwrap();
            s.due_events(at("2020-11-24T10:00:00Z")).unwrap();
            s.record_selection(&id, strings(&["hat", "ID"])).unwrap();
            before = s.trip(&id).unwrap().clone();
        }
        let mut s =
            Scheduler::with_journal(LabelSynonyms::bundled(), TrackerConfig::default(), &path)
                .unwrap();
        assert_eq!(s.trip(&id).unwrap(), &before);
        let after = s.due_events(at("2021-01-01T00:00:00Z")).unwrap();
        assert_eq!(after.len(), 1);
        assert_eq!(after[0].kind, EventKind::Alert);
    }
}
