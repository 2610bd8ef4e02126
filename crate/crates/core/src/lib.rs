//! Turns an invitation email into a curated packing list, verifies packing
//! from camera frames, and fires the reminder notifications for a trip.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! - [`itinerary`]: entity tagging and trip itinerary resolution.
//! - [`poi`]: places-of-interest search, URL filtering and review fetching.
//! - [`weather`]: stay-window forecast and the weather rule engine.
//! - [`mining`]: imperative sentences, object extraction, baselines and list
//!   aggregation.
//! - [`tracker`]: blur gating, detector cascade and smoothing over packing
//!   frames.
//! - [`scheduler`]: trip lifecycle, notification triggers and the journal.
//! - [`gateway`]: the service facade, HTTP API and configuration.
//! - [`eval`]: precision/recall harness for item extractors.
//!
//! Network access goes through [`transport::Transport`], which has a
//! record/replay implementation so every stage runs deterministically from
//! fixtures.

pub mod data;
pub mod eval;
pub mod gateway;
pub mod itinerary;
pub mod mining;
pub mod poi;
pub mod scheduler;
pub mod text;
pub mod tracker;
pub mod transport;
pub mod weather;

pub use itinerary::{CalendarDate, EmailDocument, Itinerary};
pub use mining::{RecommendationList, RecommendedItem, Source};
pub use scheduler::{NotificationEvent, TripRecord, TripState};
