//! Entity tagging over raw email text and trip itinerary resolution.
//!
//! The default [`GazetteerTagger`] tags LOCATION spans from a place-name
//! gazetteer, DATE tokens from a small date grammar, PERSON tokens from
//! honorifics and a given-name list, and MONEY/PERCENT amounts. Any other
//! backend can be plugged in through [`EntityTagger`].

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use chrono::{DateTime, Datelike, Duration, FixedOffset, NaiveDate, TimeZone, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data;
use crate::text::{char_offset, char_slice, data_lines};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ItineraryError {
    #[error("document body is empty")]
    EmptyDocument,
    #[error("no location entity found")]
    NoLocation,
    #[error("no date on or after {0} found")]
    NoFutureDate(CalendarDate),
    #[error("tagger produced an invalid span {start}..{end} ({reason})")]
    InvalidSpan {
        start: usize,
        end: usize,
        reason: &'static str,
    },
}

impl ItineraryError {
    pub fn code(&self) -> &'static str {
        match self {
            ItineraryError::EmptyDocument => "EMPTY_DOCUMENT",
            ItineraryError::NoLocation => "NO_LOCATION",
            ItineraryError::NoFutureDate(_) => "NO_FUTURE_DATE",
            ItineraryError::InvalidSpan { .. } => "INTERNAL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmailDocument {
    body: String,
    subject: Option<String>,
    received_at: DateTime<Utc>,
}

impl EmailDocument {
    pub fn new(
        body: impl Into<String>,
        received_at: DateTime<Utc>,
    ) -> Result<Self, ItineraryError> {
        let body = body.into();
        if body.trim().is_empty() {
            return Err(ItineraryError::EmptyDocument);
        }
        Ok(Self {
            body,
            subject: None,
            received_at,
        })
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = Some(subject.into());
        self
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn subject(&self) -> Option<&str> {
        self.subject.as_deref()
    }

    pub fn received_at(&self) -> DateTime<Utc> {
        self.received_at
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntityClass {
    Location,
    Person,
    Organization,
    Money,
    Percent,
    Date,
    Time,
}

/// A tagged span. Offsets are char offsets into the document body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntitySpan {
    pub surface: String,
    pub class: EntityClass,
    pub start: usize,
    pub end: usize,
}

/// Two date groups joined by a range connector ("from X to Y", "X - Y").
/// Offsets are the char offsets where each group starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub from_start: usize,
    pub to_start: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySet {
    spans: Vec<EntitySpan>,
    ranges: Vec<DateRange>,
}

impl EntitySet {
    /// Builds a set from raw spans: sorted by start offset (then end, then
    /// class) with duplicate triples removed.
    pub fn from_spans(mut spans: Vec<EntitySpan>) -> Self {
        spans.sort_by_key(|s| (s.start, s.end, s.class));
        spans.dedup_by(|a, b| (a.start, a.end, a.class) == (b.start, b.end, b.class));
        Self {
            spans,
            ranges: Vec::new(),
        }
    }

    pub fn with_ranges(mut self, ranges: Vec<DateRange>) -> Self {
        self.ranges = ranges;
        self
    }

    pub fn spans(&self) -> &[EntitySpan] {
        &self.spans
    }

    pub fn ranges(&self) -> &[DateRange] {
        &self.ranges
    }

    pub fn of_class(&self, class: EntityClass) -> impl Iterator<Item = &EntitySpan> {
        self.spans.iter().filter(move |s| s.class == class)
    }

    pub fn surfaces(&self, class: EntityClass) -> Vec<&str> {
        self.of_class(class).map(|s| s.surface.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CalendarDate(NaiveDate);

impl CalendarDate {
    pub fn new(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(Self)
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    pub fn naive(&self) -> NaiveDate {
        self.0
    }

    pub fn plus_days(&self, days: i64) -> Self {
        Self(self.0 + Duration::days(days))
    }
}

impl From<NaiveDate> for CalendarDate {
    fn from(d: NaiveDate) -> Self {
        Self(d)
    }
}

impl fmt::Display for CalendarDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl std::str::FromStr for CalendarDate {
    type Err = chrono::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").map(Self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Itinerary {
    pub destination: String,
    pub arrival: CalendarDate,
    pub departure: CalendarDate,
    pub departure_defaulted: bool,
    /// When the traveller leaves home; anchors both notification triggers.
    pub depart_home_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ItineraryConfig {
    pub default_departure_hour: u32,
    /// Offset of the traveller's local time from UTC, in minutes.
    pub utc_offset_minutes: i32,
    pub default_stay_days: i64,
    /// Region-level names skipped when choosing the destination.
    #[serde(skip)]
    pub regions: HashSet<String>,
}

impl Default for ItineraryConfig {
    fn default() -> Self {
        Self {
            default_departure_hour: 9,
            utc_offset_minutes: 0,
            default_stay_days: 7,
            regions: data_lines(data::REGIONS).map(str::to_owned).collect(),
        }
    }
}

impl ItineraryConfig {
    fn offset(&self) -> FixedOffset {
        FixedOffset::east_opt(self.utc_offset_minutes * 60)
            .unwrap_or_else(|| FixedOffset::east_opt(0).expect("zero offset"))
    }

    /// The calendar date of `instant` in the traveller's timezone.
    pub fn local_date(&self, instant: DateTime<Utc>) -> CalendarDate {
        CalendarDate(instant.with_timezone(&self.offset()).date_naive())
    }
}

/// A pluggable entity tagging backend.
pub trait EntityTagger {
    /// Tags `body`. Offsets in the returned spans are char offsets.
    fn tag(&self, body: &str) -> Vec<EntitySpan>;
}

/// Deterministic tagger backed by data files and a date grammar.
pub struct GazetteerTagger {
    locations: Option<Regex>,
    given_names: HashSet<String>,
}

const STREET_SUFFIXES: &[&str] = &[
    "Drive",
    "Dr",
    "Street",
    "St",
    "Avenue",
    "Ave",
    "Road",
    "Rd",
    "Boulevard",
    "Blvd",
    "Lane",
    "Ln",
    "Way",
    "Court",
    "Ct",
    "Place",
    "Pl",
];

const MONTHS: &str = r"Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|June?|July?|Aug(?:ust)?|Sept?(?:ember)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?";

fn iso_date_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b\d{4}-\d{2}-\d{2}\b").expect("iso regex"))
}

fn day_month_year_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(&format!(
            r"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+({MONTHS})\b\.?,?\s+(\d{{4}})\b"
        ))
        .expect("d-month-y regex")
    })
}

fn month_day_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(&format!(
            r"\b({MONTHS})\b\.?\s+(\d{{1,2}})(?:st|nd|rd|th)?\b(?:,?\s+(\d{{4}})\b)?"
        ))
        .expect("month-d regex")
    })
}

fn honorific_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"\b(?:Mr|Mrs|Ms|Miss|Dr|Prof)\.?\s+([A-Z][a-z]+)(?:\s+([A-Z][a-z]+))?")
            .expect("honorific regex")
    })
}

fn capitalized_word_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b[A-Z][a-z]+\b").expect("word regex"))
}

fn money_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[$€£₹]\s?\d[\d,]*(?:\.\d+)?").expect("money regex"))
}

fn percent_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b\d+(?:\.\d+)?\s?(?:%|percent\b)").expect("percent regex"))
}

fn street_suffix_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(&format!(r"^\s+(?:{})\b", STREET_SUFFIXES.join("|"))).expect("street regex")
    })
}

impl GazetteerTagger {
    /// Builds a tagger from gazetteer contents (one place per line).
    pub fn new(locations: &str, given_names: &str) -> Self {
        let mut names: Vec<&str> = data_lines(locations).collect();
        names.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        names.dedup();
        let locations = if names.is_empty() {
            None
        } else {
            let alternation = names
                .iter()
                .map(|n| regex::escape(n))
                .collect::<Vec<_>>()
                .join("|");
            Some(Regex::new(&format!(r"\b(?:{alternation})\b")).expect("gazetteer regex"))
        };
        Self {
            locations,
            given_names: data_lines(given_names).map(str::to_owned).collect(),
        }
    }

    fn push(out: &mut Vec<EntitySpan>, body: &str, class: EntityClass, from: usize, to: usize) {
        out.push(EntitySpan {
            surface: body[from..to].to_owned(),
            class,
            start: char_offset(body, from),
            end: char_offset(body, to),
        });
    }

    fn tag_locations(&self, body: &str, out: &mut Vec<EntitySpan>) {
        let Some(re) = &self.locations else { return };
        for m in re.find_iter(body) {
            if street_suffix_re().is_match(&body[m.end()..]) {
                continue;
            }
            Self::push(out, body, EntityClass::Location, m.start(), m.end());
        }
    }

    fn tag_dates(&self, body: &str, out: &mut Vec<EntitySpan>) {
        let mut covered: Vec<(usize, usize)> = Vec::new();
        let overlaps = |covered: &[(usize, usize)], s: usize, e: usize| {
            covered.iter().any(|&(a, b)| s < b && a < e)
        };

        for m in iso_date_re().find_iter(body) {
            covered.push((m.start(), m.end()));
            Self::push(out, body, EntityClass::Date, m.start(), m.end());
        }
        for caps in day_month_year_re().captures_iter(body) {
            let whole = caps.get(0).expect("match");
            if overlaps(&covered, whole.start(), whole.end()) {
                continue;
            }
            covered.push((whole.start(), whole.end()));
            for g in 1..=3 {
                if let Some(m) = caps.get(g) {
                    Self::push(out, body, EntityClass::Date, m.start(), m.end());
                }
            }
        }
        for caps in month_day_re().captures_iter(body) {
            let whole = caps.get(0).expect("match");
            if overlaps(&covered, whole.start(), whole.end()) {
                continue;
            }
            covered.push((whole.start(), whole.end()));
            for g in 1..=3 {
                if let Some(m) = caps.get(g) {
                    Self::push(out, body, EntityClass::Date, m.start(), m.end());
                }
            }
        }
    }

    fn tag_people(&self, body: &str, out: &mut Vec<EntitySpan>) {
        for caps in honorific_re().captures_iter(body) {
            for g in 1..=2 {
                if let Some(m) = caps.get(g) {
                    Self::push(out, body, EntityClass::Person, m.start(), m.end());
                }
            }
        }
        let words: Vec<_> = capitalized_word_re().find_iter(body).collect();
        for (i, w) in words.iter().enumerate() {
            if !self.given_names.contains(w.as_str()) {
                continue;
            }
            Self::push(out, body, EntityClass::Person, w.start(), w.end());
            // Surname: the next capitalized word when separated by one space.
            if let Some(next) = words.get(i + 1) {
                if &body[w.end()..next.start()] == " " {
                    Self::push(out, body, EntityClass::Person, next.start(), next.end());
                }
            }
        }
    }

    fn tag_amounts(&self, body: &str, out: &mut Vec<EntitySpan>) {
        for m in money_re().find_iter(body) {
            Self::push(out, body, EntityClass::Money, m.start(), m.end());
        }
        for m in percent_re().find_iter(body) {
            Self::push(out, body, EntityClass::Percent, m.start(), m.end());
        }
    }
}

impl Default for GazetteerTagger {
    fn default() -> Self {
        Self::new(data::LOCATIONS, data::GIVEN_NAMES)
    }
}

impl EntityTagger for GazetteerTagger {
    fn tag(&self, body: &str) -> Vec<EntitySpan> {
        let mut out = Vec::new();
        self.tag_locations(body, &mut out);
        self.tag_dates(body, &mut out);
        self.tag_people(body, &mut out);
        self.tag_amounts(body, &mut out);
        out
    }
}

/// Runs `tagger` over the document, validates every span and detects date
/// ranges between DATE groups.
pub fn extract_entities(
    doc: &EmailDocument,
    tagger: &dyn EntityTagger,
) -> Result<EntitySet, ItineraryError> {
    let body = doc.body();
    if body.trim().is_empty() {
        return Err(ItineraryError::EmptyDocument);
    }
    let spans = tagger.tag(body);
    for s in &spans {
        if s.start >= s.end {
            return Err(ItineraryError::InvalidSpan {
                start: s.start,
                end: s.end,
                reason: "empty or reversed",
            });
        }
        match char_slice(body, s.start, s.end) {
            Some(slice) if slice == s.surface => {}
            Some(_) => {
                return Err(ItineraryError::InvalidSpan {
                    start: s.start,
                    end: s.end,
                    reason: "surface does not match body",
                })
            }
            None => {
                return Err(ItineraryError::InvalidSpan {
                    start: s.start,
                    end: s.end,
                    reason: "out of bounds",
                })
            }
        }
    }
    let set = EntitySet::from_spans(spans);
    let ranges = detect_ranges(body, &date_groups(set.spans()));
    Ok(set.with_ranges(ranges))
}

/// DATE tokens at most this many chars apart belong to one date (", ").
const DATE_TOKEN_GAP: usize = 2;

fn date_groups(spans: &[EntitySpan]) -> Vec<Vec<&EntitySpan>> {
    let mut groups: Vec<Vec<&EntitySpan>> = Vec::new();
    for span in spans.iter().filter(|s| s.class == EntityClass::Date) {
        match groups.last_mut() {
            Some(group)
                if span.start >= group.last().expect("non-empty").end
                    && span.start - group.last().expect("non-empty").end <= DATE_TOKEN_GAP =>
            {
                group.push(span)
            }
            _ => groups.push(vec![span]),
        }
    }
    groups
}

const RANGE_CONNECTORS: &[&str] = &[
    "to", "through", "thru", "until", "till", "-", "–", "—", "and",
];

fn detect_ranges(body: &str, groups: &[Vec<&EntitySpan>]) -> Vec<DateRange> {
    groups
        .windows(2)
        .filter_map(|pair| {
            let first_end = pair[0].last()?.end;
            let second_start = pair[1].first()?.start;
            let gap = char_slice(body, first_end, second_start)?;
            let gap = gap.trim().trim_end_matches(',').trim().to_lowercase();
            if !RANGE_CONNECTORS.contains(&gap.as_str()) {
                return None;
            }
            if gap == "and" {
                // Only "between X and Y" is a range.
                let before = char_slice(body, 0, pair[0].first()?.start)?;
                if !before.trim_end().to_lowercase().ends_with("between") {
                    return None;
                }
            }
            Some(DateRange {
                from_start: pair[0].first()?.start,
                to_start: second_start,
            })
        })
        .collect()
}

fn month_number(token: &str) -> Option<u32> {
    let lower = token.trim_end_matches('.').to_lowercase();
    let prefix = lower.get(..3)?;
    let n = match prefix {
        "jan" => 1,
        "feb" => 2,
        "mar" => 3,
        "apr" => 4,
        "may" => 5,
        "jun" => 6,
        "jul" => 7,
        "aug" => 8,
        "sep" => 9,
        "oct" => 10,
        "nov" => 11,
        "dec" => 12,
        _ => return None,
    };
    Some(n)
}

fn day_number(token: &str) -> Option<u32> {
    let digits = token.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    if digits.is_empty() || digits.len() > 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|d| (1..=31).contains(d))
}

fn year_number(token: &str) -> Option<i32> {
    if token.len() == 4 && token.bytes().all(|b| b.is_ascii_digit()) {
        token.parse().ok()
    } else {
        None
    }
}

/// Month/day with no year: the next occurrence on or after `reference`.
fn next_occurrence(month: u32, day: u32, reference: CalendarDate) -> Option<CalendarDate> {
    (reference.year()..=reference.year() + 8)
        .filter_map(|y| CalendarDate::new(y, month, day))
        .find(|d| *d >= reference)
}

/// A date parsed out of a DATE group, with the char offset it started at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LocatedDate {
    date: CalendarDate,
    start: usize,
}

fn parse_group(group: &[&EntitySpan], reference: CalendarDate, out: &mut Vec<LocatedDate>) {
    let mut i = 0;
    while i < group.len() {
        let token = group[i].surface.as_str();
        let start = group[i].start;
        if let Ok(date) = token.parse::<CalendarDate>() {
            out.push(LocatedDate { date, start });
            i += 1;
            continue;
        }
        if let Some(month) = month_number(token) {
            if let Some(day) = group.get(i + 1).and_then(|t| day_number(&t.surface)) {
                match group.get(i + 2).and_then(|t| year_number(&t.surface)) {
                    Some(year) => {
                        if let Some(date) = CalendarDate::new(year, month, day) {
                            out.push(LocatedDate { date, start });
                        }
                        i += 3;
                    }
                    None => {
                        if let Some(date) = next_occurrence(month, day, reference) {
                            out.push(LocatedDate { date, start });
                        }
                        i += 2;
                    }
                }
                continue;
            }
        }
        if let Some(day) = day_number(token) {
            let month = group.get(i + 1).and_then(|t| month_number(&t.surface));
            let year = group.get(i + 2).and_then(|t| year_number(&t.surface));
            if let (Some(month), Some(year)) = (month, year) {
                if let Some(date) = CalendarDate::new(year, month, day) {
                    out.push(LocatedDate { date, start });
                }
                i += 3;
                continue;
            }
        }
        i += 1;
    }
}

fn located_dates(entities: &EntitySet, reference: CalendarDate) -> Vec<LocatedDate> {
    let mut out = Vec::new();
    for group in date_groups(entities.spans()) {
        parse_group(&group, reference, &mut out);
    }
    out
}

/// Merges DATE tokens into calendar dates. Dates without a year take their
/// next occurrence on or after the reference date (UTC). The output is
/// sorted and deduplicated; unparseable fragments are dropped.
pub fn normalize_dates(entities: &EntitySet, reference: DateTime<Utc>) -> Vec<CalendarDate> {
    let reference = CalendarDate(reference.date_naive());
    let mut dates: Vec<_> = located_dates(entities, reference)
        .into_iter()
        .map(|d| d.date)
        .collect();
    dates.sort();
    dates.dedup();
    dates
}

/// Resolves the trip itinerary from tagged entities.
///
/// The destination is the first LOCATION by offset that is not a region-level
/// name (falling back to the first LOCATION when every match is a region).
/// Arrival is the earliest date on or after the reference day. Departure is
/// the far end of a date range starting on or after arrival when the document
/// has one, otherwise arrival plus the default stay.
pub fn resolve_itinerary(
    entities: &EntitySet,
    reference: DateTime<Utc>,
    config: &ItineraryConfig,
) -> Result<Itinerary, ItineraryError> {
    let locations: Vec<&EntitySpan> = entities.of_class(EntityClass::Location).collect();
    let destination = locations
        .iter()
        .find(|s| !config.regions.contains(s.surface.as_str()))
        .or_else(|| locations.first())
        .ok_or(ItineraryError::NoLocation)?
        .surface
        .clone();

    let today = config.local_date(reference);
    let dated = located_dates(entities, today);
    let arrival = dated
        .iter()
        .map(|d| d.date)
        .filter(|d| *d >= today)
        .min()
        .ok_or(ItineraryError::NoFutureDate(today))?;

    let date_at = |offset: usize| dated.iter().find(|d| d.start == offset).map(|d| d.date);
    let ranged_departure = entities
        .ranges()
        .iter()
        .filter_map(|r| Some((date_at(r.from_start)?, date_at(r.to_start)?)))
        .filter(|(from, to)| *from >= arrival && to >= from)
        .min_by_key(|(from, _)| *from)
        .map(|(_, to)| to);

    let (departure, departure_defaulted) = match ranged_departure {
        Some(to) => (to, false),
        None => (arrival.plus_days(config.default_stay_days), true),
    };

    let hour = config.default_departure_hour.min(23);
    let local = arrival.naive().and_hms_opt(hour, 0, 0).expect("valid hour");
    let depart_home_at = config
        .offset()
        .from_local_datetime(&local)
        .single()
        .expect("fixed offsets are unambiguous")
        .with_timezone(&Utc);

    Ok(Itinerary {
        destination,
        arrival,
        departure,
        departure_defaulted,
        depart_home_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(body: &str) -> EmailDocument {
        EmailDocument::new(body, Utc.with_ymd_and_hms(2020, 11, 20, 0, 0, 0).unwrap()).unwrap()
    }

    fn at(y: i32, m: u32, d: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, m, d, 0, 0, 0).unwrap()
    }

    fn date(y: i32, m: u32, d: u32) -> CalendarDate {
        CalendarDate::new(y, m, d).unwrap()
    }

    #[test]
    fn blank_document_is_rejected() {
        assert_eq!(
            EmailDocument::new("   \n", at(2020, 1, 1)).unwrap_err(),
            ItineraryError::EmptyDocument
        );
        assert_eq!(
            EmailDocument::new("", at(2020, 1, 1)).unwrap_err().code(),
            "EMPTY_DOCUMENT"
        );
    }

    #[test]
    fn paris_sentence_tags_location_and_date() {
        let tagger = GazetteerTagger::new("Paris", "");
        let set = extract_entities(&doc("Visit Paris on Nov 5, 2021."), &tagger).unwrap();
        assert_eq!(set.surfaces(EntityClass::Location), vec!["Paris"]);
        assert_eq!(set.surfaces(EntityClass::Date), vec!["Nov", "5", "2021"]);
        let dates = set.of_class(EntityClass::Date).collect::<Vec<_>>();
        assert_eq!(dates.first().unwrap().start, 15);
        assert_eq!(dates.last().unwrap().end, 26);
    }

    #[test]
    fn street_names_are_not_locations() {
        let tagger = GazetteerTagger::new("Lincoln\nNewport", "");
        let set = extract_entities(&doc("1722 Lincoln Drive, off to Newport"), &tagger).unwrap();
        assert_eq!(set.surfaces(EntityClass::Location), vec!["Newport"]);
    }

    #[test]
    fn longest_gazetteer_entry_wins() {
        let tagger = GazetteerTagger::new("New York\nYork", "");
        let set = extract_entities(&doc("the New York Firm"), &tagger).unwrap();
        assert_eq!(set.surfaces(EntityClass::Location), vec!["New York"]);
    }

    #[test]
    fn date_grammar_variants() {
        let tagger = GazetteerTagger::new("", "");
        let set = extract_entities(
            &doc("on 2021-03-01, 5 November 2021 and March 3rd"),
            &tagger,
        )
        .unwrap();
        assert_eq!(
            normalize_dates(&set, at(2021, 1, 1)),
            vec![date(2021, 3, 1), date(2021, 3, 3), date(2021, 11, 5)]
        );
    }

    #[test]
    fn yearless_date_rolls_to_next_year() {
        let tagger = GazetteerTagger::new("", "");
        let set = extract_entities(&doc("join on Nov 5."), &tagger).unwrap();
        assert_eq!(
            normalize_dates(&set, at(2020, 12, 1)),
            vec![date(2021, 11, 5)]
        );
        assert_eq!(
            normalize_dates(&set, at(2020, 11, 5)),
            vec![date(2020, 11, 5)]
        );
    }

    #[test]
    fn empty_date_list_normalizes_to_nothing() {
        assert!(normalize_dates(&EntitySet::default(), at(2020, 1, 1)).is_empty());
    }

    #[test]
    fn invalid_calendar_dates_are_dropped() {
        let tagger = GazetteerTagger::new("", "");
        let set = extract_entities(&doc("Feb 30, 2021 or Feb 28, 2021"), &tagger).unwrap();
        assert_eq!(
            normalize_dates(&set, at(2021, 1, 1)),
            vec![date(2021, 2, 28)]
        );
    }

    #[test]
    fn single_date_defaults_departure_a_week_later() {
        let tagger = GazetteerTagger::new("Paris", "");
        let set = extract_entities(&doc("Paris trip on 2021-03-01."), &tagger).unwrap();
        let it = resolve_itinerary(&set, at(2021, 2, 1), &ItineraryConfig::default()).unwrap();
        assert_eq!(it.arrival, date(2021, 3, 1));
        assert_eq!(it.departure, date(2021, 3, 8));
        assert!(it.departure_defaulted);
        assert_eq!(
            it.depart_home_at,
            Utc.with_ymd_and_hms(2021, 3, 1, 9, 0, 0).unwrap()
        );
    }

    #[test]
    fn explicit_range_sets_departure() {
        let tagger = GazetteerTagger::new("Paris", "");
        let set =
            extract_entities(&doc("In Paris from Mar 1, 2021 to Mar 4, 2021."), &tagger).unwrap();
        assert_eq!(set.ranges().len(), 1);
        let it = resolve_itinerary(&set, at(2021, 2, 1), &ItineraryConfig::default()).unwrap();
        assert_eq!(it.arrival, date(2021, 3, 1));
        assert_eq!(it.departure, date(2021, 3, 4));
        assert!(!it.departure_defaulted);
    }

    #[test]
    fn between_and_is_a_range_but_plain_and_is_not() {
        let tagger = GazetteerTagger::new("Paris", "");
        let ranged =
            extract_entities(&doc("Paris between 2021-03-01 and 2021-03-03"), &tagger).unwrap();
        assert_eq!(ranged.ranges().len(), 1);
        let plain = extract_entities(&doc("Paris 2021-03-01 and 2021-03-03"), &tagger).unwrap();
        assert!(plain.ranges().is_empty());
    }

    #[test]
    fn missing_location_or_date() {
        let tagger = GazetteerTagger::new("Paris", "");
        let no_date = extract_entities(&doc("Welcome to Paris."), &tagger).unwrap();
        assert!(matches!(
            resolve_itinerary(&no_date, at(2021, 1, 1), &ItineraryConfig::default()),
            Err(ItineraryError::NoFutureDate(_))
        ));
        let past = extract_entities(&doc("Paris on 2020-01-01."), &tagger).unwrap();
        assert!(matches!(
            resolve_itinerary(&past, at(2021, 1, 1), &ItineraryConfig::default()),
            Err(ItineraryError::NoFutureDate(_))
        ));
        let no_loc = extract_entities(&doc("See you 2021-03-01."), &tagger).unwrap();
        assert_eq!(
            resolve_itinerary(&no_loc, at(2021, 1, 1), &ItineraryConfig::default()),
            Err(ItineraryError::NoLocation)
        );
    }

    #[test]
    fn region_only_location_is_used_as_fallback() {
        let tagger = GazetteerTagger::new("FL", "");
        let set = extract_entities(&doc("Trip to FL on 2021-03-01"), &tagger).unwrap();
        let it = resolve_itinerary(&set, at(2021, 1, 1), &ItineraryConfig::default()).unwrap();
        assert_eq!(it.destination, "FL");
    }

    #[test]
    fn local_offset_shifts_departure_instant() {
        let tagger = GazetteerTagger::new("Paris", "");
        let set = extract_entities(&doc("Paris on 2021-03-01"), &tagger).unwrap();
        let config = ItineraryConfig {
            utc_offset_minutes: 60,
            ..ItineraryConfig::default()
        };
        let it = resolve_itinerary(&set, at(2021, 1, 1), &config).unwrap();
        assert_eq!(
            it.depart_home_at,
            Utc.with_ymd_and_hms(2021, 3, 1, 8, 0, 0).unwrap()
        );
    }

    #[test]
    fn people_from_honorifics_and_given_names() {
        let tagger = GazetteerTagger::new("", "Cecil\nGeorge");
        let set = extract_entities(
            &doc("Dear Mr. Wingly, Regards, Cecil Dawson Conference. George Peterson Manager"),
            &tagger,
        )
        .unwrap();
        assert_eq!(
            set.surfaces(EntityClass::Person),
            vec!["Wingly", "Cecil", "Dawson", "George", "Peterson"]
        );
    }

    #[test]
    fn money_and_percent_amounts() {
        let tagger = GazetteerTagger::new("", "");
        let set = extract_entities(&doc("Fee is $25.50 with a 40% chance"), &tagger).unwrap();
        assert_eq!(set.surfaces(EntityClass::Money), vec!["$25.50"]);
        assert_eq!(set.surfaces(EntityClass::Percent), vec!["40%"]);
    }

    struct BadTagger;

    impl EntityTagger for BadTagger {
        fn tag(&self, _body: &str) -> Vec<EntitySpan> {
            vec![EntitySpan {
                surface: "nope".into(),
                class: EntityClass::Location,
                start: 0,
                end: 4,
            }]
        }
    }

    #[test]
    fn tagger_spans_are_validated() {
        assert!(matches!(
            extract_entities(&doc("Paris"), &BadTagger),
            Err(ItineraryError::InvalidSpan { .. })
        ));
    }
}
