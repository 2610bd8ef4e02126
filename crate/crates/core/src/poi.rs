//! Places-of-interest discovery: query construction, provider URL filtering
//! and POI page/review fetching.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::transport::{HttpRequest, Transport, TransportError};

pub const DEFAULT_PROVIDER_TOKEN: &str = "tripadvisor";
pub const DEFAULT_POI_LIMIT: usize = 10;
pub const DEFAULT_REVIEWS_PER_POI: usize = 30;

#[derive(Debug, Error)]
pub enum PoiError {
    #[error("destination is empty")]
    EmptyDestination,
    #[error("provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("no provider results for {0:?}")]
    NoResults(String),
}

impl PoiError {
    pub fn code(&self) -> &'static str {
        match self {
            PoiError::EmptyDestination => "EMPTY_DESTINATION",
            PoiError::ProviderUnavailable(_) => "PROVIDER_UNAVAILABLE",
            PoiError::NoResults(_) => "NO_RESULTS",
        }
    }
}

impl From<TransportError> for PoiError {
    fn from(e: TransportError) -> Self {
        PoiError::ProviderUnavailable(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoiQuery {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub text: String,
    /// Timestamp the provider reports for the review.
    pub fetched_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poi {
    pub name: String,
    pub url: String,
    pub reviews: Vec<Review>,
    pub popular_mentions: Vec<String>,
}

pub fn build_poi_query(destination: &str) -> Result<PoiQuery, PoiError> {
    if destination.trim().is_empty() {
        return Err(PoiError::EmptyDestination);
    }
    Ok(PoiQuery {
        text: format!("things to do in {destination} tripadvisor.com"),
    })
}

/// Keeps URLs whose lowercase form contains `token`, in order.
pub fn filter_urls_by_token(urls: &[String], token: &str) -> Vec<String> {
    let token = token.to_lowercase();
    urls.iter()
        .filter(|u| u.to_lowercase().contains(&token))
        .cloned()
        .collect()
}

pub fn filter_provider_urls(urls: &[String]) -> Vec<String> {
    filter_urls_by_token(urls, DEFAULT_PROVIDER_TOKEN)
}

/// Popular-mention tokens from a provider POI page, deduplicated
/// case-insensitively with first-seen order and spelling kept.
pub fn parse_popular_mentions(payload: &str) -> Vec<String> {
    let Ok(page) = serde_json::from_str::<Value>(payload) else {
        return Vec::new();
    };
    let Some(mentions) = page.get("popular_mentions").and_then(Value::as_array) else {
        return Vec::new();
    };
    let mut seen = std::collections::HashSet::new();
    mentions
        .iter()
        .filter_map(Value::as_str)
        .map(str::trim)
        .filter(|m| !m.is_empty() && seen.insert(m.to_lowercase()))
        .map(str::to_owned)
        .collect()
}

/// A POI provider: a search endpoint plus per-POI pages.
pub trait PoiProvider: Send + Sync {
    /// Substring a result URL must contain to count as a provider page.
    fn token(&self) -> &str;
    /// Raw result URLs for the query, in rank order.
    fn search(&self, query: &PoiQuery) -> Result<Vec<String>, PoiError>;
    /// The raw POI page document.
    fn page(&self, url: &str) -> Result<String, PoiError>;
}

#[derive(Debug, Deserialize)]
struct SearchPayload {
    results: Vec<SearchResult>,
}

#[derive(Debug, Deserialize)]
struct SearchResult {
    url: String,
}

#[derive(Debug, Deserialize)]
struct PagePayload {
    name: String,
    #[serde(default)]
    reviews: Vec<ReviewPayload>,
}

#[derive(Debug, Deserialize)]
struct ReviewPayload {
    text: String,
    published_at: DateTime<Utc>,
}

/// JSON search API + provider page client over any [`Transport`].
///
/// Search: `GET {search_endpoint}?q=<query>` returning
/// `{"results": [{"title": .., "url": ..}]}`. Pages: `GET <url>` returning
/// `{"name": .., "popular_mentions": [..], "reviews": [{"text": .., "published_at": ..}]}`.
pub struct WebPoiProvider<T> {
    transport: T,
    search_endpoint: String,
    token: String,
}

impl<T: Transport> WebPoiProvider<T> {
    pub fn new(transport: T, search_endpoint: impl Into<String>) -> Self {
        Self {
            transport,
            search_endpoint: search_endpoint.into(),
            token: DEFAULT_PROVIDER_TOKEN.into(),
        }
    }

    pub fn search_request(&self, query: &PoiQuery) -> HttpRequest {
        let url = url::Url::parse_with_params(&self.search_endpoint, &[("q", &query.text)])
            .map(String::from)
            .unwrap_or_else(|_| format!("{}?q={}", self.search_endpoint, query.text));
        HttpRequest::get(url)
    }

    fn fetch(&self, request: &HttpRequest) -> Result<String, PoiError> {
        let response = self.transport.send(request)?;
        if !response.is_success() {
            return Err(PoiError::ProviderUnavailable(format!(
                "{} returned status {}",
                request.url, response.status
            )));
        }
        Ok(response.body)
    }
}

impl<T: Transport> PoiProvider for WebPoiProvider<T> {
    fn token(&self) -> &str {
        &self.token
    }

    fn search(&self, query: &PoiQuery) -> Result<Vec<String>, PoiError> {
        let body = self.fetch(&self.search_request(query))?;
        let payload: SearchPayload = serde_json::from_str(&body)
            .map_err(|e| PoiError::ProviderUnavailable(format!("bad search payload: {e}")))?;
        Ok(payload.results.into_iter().map(|r| r.url).collect())
    }

    fn page(&self, url: &str) -> Result<String, PoiError> {
        self.fetch(&HttpRequest::get(url))
    }
}

fn parse_page(url: &str, payload: &str, reviews_per_poi: usize) -> Result<Poi, PoiError> {
    let page: PagePayload = serde_json::from_str(payload)
        .map_err(|e| PoiError::ProviderUnavailable(format!("bad page payload for {url}: {e}")))?;
    let mut reviews: Vec<Review> = page
        .reviews
        .into_iter()
        .filter(|r| !r.text.trim().is_empty())
        .map(|r| Review {
            text: r.text,
            fetched_at: r.published_at,
        })
        .collect();
    // Newest first; stable so equal timestamps keep payload order.
    reviews.sort_by_key(|r| std::cmp::Reverse(r.fetched_at));
    reviews.truncate(reviews_per_poi);
    Ok(Poi {
        name: page.name,
        url: url.to_owned(),
        reviews,
        popular_mentions: parse_popular_mentions(payload),
    })
}

/// Searches for POIs around `destination` and fetches each POI page.
/// Pages are fetched concurrently; results keep search-rank order.
pub fn fetch_pois(
    destination: &str,
    provider: &dyn PoiProvider,
    limit: usize,
    reviews_per_poi: usize,
) -> Result<Vec<Poi>, PoiError> {
    let query = build_poi_query(destination)?;
    let urls = provider.search(&query)?;
    let mut urls = filter_urls_by_token(&urls, provider.token());
    urls.dedup();
    urls.truncate(limit);
    if urls.is_empty() {
        return Err(PoiError::NoResults(destination.to_owned()));
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = urls
            .iter()
            .map(|url| {
                scope.spawn(move || {
                    provider
                        .page(url)
                        .and_then(|payload| parse_page(url, &payload, reviews_per_poi))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("page fetch thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::{HttpResponse, MemoryTransport};

    const SEARCH: &str = "https://search.test/search";

    fn provider_with(pages: &[(&str, &str)], urls: &[&str]) -> WebPoiProvider<MemoryTransport> {
        let results: Vec<_> = urls
            .iter()
            .map(|u| serde_json::json!({"title": "t", "url": u}))
            .collect();
        let search_body = serde_json::json!({ "results": results }).to_string();
        let probe = WebPoiProvider::new(MemoryTransport::new(), SEARCH);
        let mut memory = MemoryTransport::new().route(
            probe.search_request(&build_poi_query("Newport").unwrap()),
            HttpResponse::ok(search_body),
        );
        for (url, body) in pages {
            memory = memory.route(HttpRequest::get(*url), HttpResponse::ok(*body));
        }
        WebPoiProvider::new(memory, SEARCH)
    }

    #[test]
    fn query_template() {
        assert_eq!(
            build_poi_query("Newport").unwrap().text,
            "things to do in Newport tripadvisor.com"
        );
        assert_eq!(
            build_poi_query("New York").unwrap().text,
            "things to do in New York tripadvisor.com"
        );
        assert!(matches!(
            build_poi_query(""),
            Err(PoiError::EmptyDestination)
        ));
    }

    #[test]
    fn url_filter_is_case_insensitive_substring() {
        let urls = vec![
            "https://www.tripadvisor.com/x".to_string(),
            "https://blog.example.com".to_string(),
        ];
        assert_eq!(
            filter_provider_urls(&urls),
            vec!["https://www.tripadvisor.com/x"]
        );
        assert!(filter_provider_urls(&[]).is_empty());
        let both = vec![
            "HTTP://TRIPADVISOR.COM/A".to_string(),
            "https://tripadvisorclone.net/b".to_string(),
        ];
        assert_eq!(filter_provider_urls(&both), both);
    }

    #[test]
    fn popular_mentions_parsing() {
        assert_eq!(
            parse_popular_mentions(r#"{"popular_mentions": ["water", "shoes"]}"#),
            vec!["water", "shoes"]
        );
        assert!(parse_popular_mentions(r#"{"name": "x"}"#).is_empty());
        assert!(parse_popular_mentions("<html>").is_empty());
        assert_eq!(
            parse_popular_mentions(r#"{"popular_mentions": ["water", "hat", "Water"]}"#),
            vec!["water", "hat"]
        );
    }

    #[test]
    fn fetch_respects_limits_and_orders_reviews() {
        let page = r#"{"name": "Nye Beach", "popular_mentions": ["sand"],
            "reviews": [
                {"text": "old", "published_at": "2020-01-01T00:00:00Z"},
                {"text": "new", "published_at": "2020-03-01T00:00:00Z"},
                {"text": "mid", "published_at": "2020-02-01T00:00:00Z"}
            ]}"#;
        let provider = provider_with(
            &[
                ("https://www.tripadvisor.com/a", page),
                ("https://www.tripadvisor.com/b", page),
            ],
            &[
                "https://www.tripadvisor.com/a",
                "https://blog.example.com/c",
                "https://www.tripadvisor.com/b",
            ],
        );
        let pois = fetch_pois("Newport", &provider, 1, 2).unwrap();
        assert_eq!(pois.len(), 1);
        assert_eq!(pois[0].url, "https://www.tripadvisor.com/a");
        let texts: Vec<_> = pois[0].reviews.iter().map(|r| r.text.as_str()).collect();
        assert_eq!(texts, vec!["new", "mid"]);
        assert_eq!(pois[0].popular_mentions, vec!["sand"]);
    }

    #[test]
    fn no_provider_urls_is_no_results() {
        let provider = provider_with(&[], &["https://blog.example.com/c"]);
        assert!(matches!(
            fetch_pois("Newport", &provider, 10, 30),
            Err(PoiError::NoResults(_))
        ));
    }

    #[test]
    fn transport_failure_is_provider_unavailable() {
        let provider = WebPoiProvider::new(MemoryTransport::new(), SEARCH);
        let err = fetch_pois("Newport", &provider, 10, 30).unwrap_err();
        assert_eq!(err.code(), "PROVIDER_UNAVAILABLE");
    }
}
