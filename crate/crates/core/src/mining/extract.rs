use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{MiningError, Sentence};
use crate::data;
use crate::text::{char_slice, data_lines, normalize_name};
use crate::transport::{HttpRequest, Transport};

/// Default question put to question-answering extractors.
pub const DEFAULT_QUERY: &str =
    "What are the things a person might want to carry along while going on a trip?";

pub trait ObjectExtractor: Send + Sync {
    /// Carry-able objects mentioned in the sentence, in sentence order.
    fn extract(&self, sentence: &Sentence) -> Result<Vec<String>, MiningError>;
}

pub fn extract_objects(
    sentence: &Sentence,
    extractor: &dyn ObjectExtractor,
) -> Result<Vec<String>, MiningError> {
    extractor.extract(sentence)
}

fn token_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"[\p{L}\p{N}]+(?:['’\-][\p{L}\p{N}]+)*|[,;:.!?]").expect("token regex")
    })
}

fn tokenize(text: &str) -> Vec<String> {
    token_re()
        .find_iter(text)
        .map(|m| m.as_str().replace('’', "'").to_lowercase())
        .collect()
}

/// Carry-able item names with aliases. Lines are `name` or
/// `name: alias, alias`; matching is on lowercase tokens, longest first.
#[derive(Debug, Clone, Default)]
pub struct CarryableGazetteer {
    by_first_token: HashMap<String, Vec<(Vec<String>, String)>>,
    names: Vec<String>,
}

impl CarryableGazetteer {
    pub fn from_list(contents: &str) -> Self {
        let mut gazetteer = Self::default();
        for line in data_lines(contents) {
            let (name, aliases) = line.split_once(':').unwrap_or((line, ""));
            let name = normalize_name(name);
            if name.is_empty() {
                continue;
            }
            gazetteer.insert(&name, &name);
            for alias in aliases.split(',').map(str::trim).filter(|a| !a.is_empty()) {
                gazetteer.insert(alias, &name);
            }
            gazetteer.names.push(name);
        }
        for entries in gazetteer.by_first_token.values_mut() {
            entries.sort_by_key(|e| std::cmp::Reverse(e.0.len()));
        }
        gazetteer
    }

    fn insert(&mut self, surface: &str, name: &str) {
        let tokens = tokenize(surface);
        let Some(first) = tokens.first().cloned() else {
            return;
        };
        self.by_first_token
            .entry(first)
            .or_default()
            .push((tokens, name.to_owned()));
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// Longest entry starting at `tokens[at]`: (tokens consumed, name).
    fn longest_match(&self, tokens: &[String], at: usize) -> Option<(usize, &str)> {
        self.by_first_token
            .get(&tokens[at])?
            .iter()
            .find(|(phrase, _)| tokens[at..].starts_with(phrase))
            .map(|(phrase, name)| (phrase.len(), name.as_str()))
    }
}

#[derive(Debug, Clone)]
pub struct ExtractorConfig {
    trigger_verbs: HashSet<String>,
    positive_heads: Vec<Vec<String>>,
    negative_heads: Vec<Vec<String>>,
    gazetteer: CarryableGazetteer,
}

pub const DEFAULT_TRIGGER_VERBS: &[&str] = &[
    "bring", "take", "carry", "wear", "pack", "apply", "grab", "keep", "buy",
];
pub const DEFAULT_POSITIVE_HEADS: &[&str] = &["don't forget", "do not forget", "be sure"];
pub const DEFAULT_NEGATIVE_HEADS: &[&str] = &["don't", "do not", "never"];

impl ExtractorConfig {
    pub fn new<S: AsRef<str>>(
        trigger_verbs: &[S],
        positive_heads: &[S],
        negative_heads: &[S],
        gazetteer: CarryableGazetteer,
    ) -> Result<Self, MiningError> {
        if gazetteer.is_empty() {
            return Err(MiningError::BadConfig(
                "carryable gazetteer is empty".into(),
            ));
        }
        let phrases = |list: &[S]| -> Vec<Vec<String>> {
            let mut v: Vec<_> = list
                .iter()
                .map(|p| tokenize(p.as_ref()))
                .filter(|t| !t.is_empty())
                .collect();
            v.sort_by_key(|p| std::cmp::Reverse(p.len()));
            v
        };
        let positive_heads = phrases(positive_heads);
        let negative_heads = phrases(negative_heads);
        if let Some(shared) = positive_heads.iter().find(|p| negative_heads.contains(p)) {
            return Err(MiningError::BadConfig(format!(
                "head {:?} is both positive and negative",
                shared.join(" ")
            )));
        }
        Ok(Self {
            trigger_verbs: trigger_verbs
                .iter()
                .map(|v| v.as_ref().to_lowercase())
                .collect(),
            positive_heads,
            negative_heads,
            gazetteer,
        })
    }

    pub fn gazetteer(&self) -> &CarryableGazetteer {
        &self.gazetteer
    }
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self::new(
            DEFAULT_TRIGGER_VERBS,
            DEFAULT_POSITIVE_HEADS,
            DEFAULT_NEGATIVE_HEADS,
            CarryableGazetteer::from_list(data::CARRYABLE_GAZETTEER),
        )
        .expect("bundled extractor config is valid")
    }
}

/// Deterministic head-and-gazetteer extractor.
///
/// A positive head ("don't forget", "be sure") or a trigger verb opens
/// collection; gazetteer matches after it are reported. A negative head
/// ("don't", "never", not followed by "forget") suppresses trigger verbs
/// until the next clause break. "not" is not a negative head, so
/// "good shoes not flip flop" still yields "flip flops".
#[derive(Debug, Clone, Default)]
pub struct PatternExtractor {
    config: ExtractorConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scan {
    Idle,
    Collecting,
    Suppressed,
}

impl PatternExtractor {
    pub fn new(config: ExtractorConfig) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &ExtractorConfig {
        &self.config
    }

    fn head_at(heads: &[Vec<String>], tokens: &[String], at: usize) -> Option<usize> {
        heads
            .iter()
            .find(|h| tokens[at..].starts_with(h))
            .map(Vec::len)
    }

    pub fn extract_text(&self, text: &str) -> Vec<String> {
        let tokens = tokenize(text);
        let mut state = Scan::Idle;
        let mut found: Vec<String> = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let token = tokens[i].as_str();
            match token {
                "," | ";" | ":" => {
                    if state == Scan::Suppressed {
                        state = Scan::Idle;
                    }
                    i += 1;
                    continue;
                }
                "." | "!" | "?" => {
                    state = Scan::Idle;
                    i += 1;
                    continue;
                }
                _ => {}
            }
            if let Some(len) = Self::head_at(&self.config.positive_heads, &tokens, i) {
                state = Scan::Collecting;
                i += len;
                continue;
            }
            if let Some(len) = Self::head_at(&self.config.negative_heads, &tokens, i) {
                if tokens.get(i + len).map(String::as_str) != Some("forget") {
                    state = Scan::Suppressed;
                    i += len;
                    continue;
                }
            }
            if self.config.trigger_verbs.contains(token) {
                if state != Scan::Suppressed {
                    state = Scan::Collecting;
                }
                i += 1;
                continue;
            }
            if state == Scan::Collecting {
                if let Some((len, name)) = self.config.gazetteer.longest_match(&tokens, i) {
                    if !found.iter().any(|f| f == name) {
                        found.push(name.to_owned());
                    }
                    i += len;
                    continue;
                }
            }
            i += 1;
        }
        found
    }
}

impl ObjectExtractor for PatternExtractor {
    fn extract(&self, sentence: &Sentence) -> Result<Vec<String>, MiningError> {
        Ok(self.extract_text(&sentence.text))
    }
}

#[derive(Debug, Serialize)]
pub struct RemoteRequest<'a> {
    pub sentence: &'a str,
    pub query: &'a str,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
pub struct RemoteSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Deserialize, Serialize)]
pub struct RemoteResponse {
    pub spans: Vec<RemoteSpan>,
}

/// Extractor backed by a span-prediction service: POSTs
/// `{"sentence", "query"}` and reads `{"spans": [{"start", "end"}]}` with
/// char offsets into the sentence.
pub struct RemoteExtractor<T> {
    transport: T,
    endpoint: String,
    query: String,
}

impl<T: Transport> RemoteExtractor<T> {
    pub fn new(transport: T, endpoint: impl Into<String>) -> Self {
        Self {
            transport,
            endpoint: endpoint.into(),
            query: DEFAULT_QUERY.into(),
        }
    }

    pub fn with_query(mut self, query: impl Into<String>) -> Self {
        self.query = query.into();
        self
    }

    pub fn request(&self, sentence: &str) -> HttpRequest {
        let body = serde_json::to_string(&RemoteRequest {
            sentence,
            query: &self.query,
        })
        .expect("request serializes");
        HttpRequest::post_json(self.endpoint.clone(), body)
    }
}

impl<T: Transport> ObjectExtractor for RemoteExtractor<T> {
    fn extract(&self, sentence: &Sentence) -> Result<Vec<String>, MiningError> {
        let response = self
            .transport
            .send(&self.request(&sentence.text))
            .map_err(|e| MiningError::Extractor(e.to_string()))?;
        if !response.is_success() {
            return Err(MiningError::Extractor(format!(
                "extractor returned status {}",
                response.status
            )));
        }
        let parsed: RemoteResponse = serde_json::from_str(&response.body)
            .map_err(|e| MiningError::Extractor(format!("bad extractor response: {e}")))?;
        let mut out: Vec<String> = Vec::new();
        for span in parsed.spans {
            let surface = char_slice(&sentence.text, span.start, span.end).ok_or_else(|| {
                MiningError::Extractor(format!("span {}..{} out of range", span.start, span.end))
            })?;
            let name = normalize_name(surface);
            if !name.is_empty() && !out.contains(&name) {
                out.push(name);
            }
        }
        Ok(out)
    }
}
