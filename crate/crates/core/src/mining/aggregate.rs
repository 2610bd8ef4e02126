use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::text::normalize_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Source {
    EmailNote,
    Weather,
    Review,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendedItem {
    pub name: String,
    pub source: Source,
    /// The sentence or rule id the item came from.
    pub evidence: String,
}

impl RecommendedItem {
    pub fn new(name: &str, source: Source, evidence: impl Into<String>) -> Self {
        Self {
            name: normalize_name(name),
            source,
            evidence: evidence.into(),
        }
    }
}

/// Items unique by normalized name, grouped EMAIL_NOTE, WEATHER, REVIEW.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationList {
    pub items: Vec<RecommendedItem>,
}

impl RecommendationList {
    /// Normalizes names, keeps the first item per name and orders by source
    /// (stable within a source).
    pub fn from_items(items: impl IntoIterator<Item = RecommendedItem>) -> Self {
        let mut seen = HashSet::new();
        let mut items: Vec<RecommendedItem> = items
            .into_iter()
            .map(|mut item| {
                item.name = normalize_name(&item.name);
                item
            })
            .filter(|item| !item.name.is_empty() && seen.insert(item.name.clone()))
            .collect();
        items.sort_by_key(|item| item.source);
        Self { items }
    }

    pub fn names(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&RecommendedItem> {
        let name = normalize_name(name);
        self.items.iter().find(|i| i.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Merges the three sources; on duplicate names the first one in
/// EMAIL_NOTE, WEATHER, REVIEW order wins.
pub fn aggregate_recommendations(
    email_items: Vec<RecommendedItem>,
    review_items: Vec<RecommendedItem>,
    weather_items: Vec<RecommendedItem>,
) -> RecommendationList {
    RecommendationList::from_items(
        email_items
            .into_iter()
            .chain(weather_items)
            .chain(review_items),
    )
}
