//! Review and email mining: sentence splitting, imperative detection,
//! object extraction, keyword baselines and recommendation aggregation.

mod aggregate;
mod extract;
mod imperative;
mod sentence;
mod tfidf;

use thiserror::Error;

pub use aggregate::{aggregate_recommendations, RecommendationList, RecommendedItem, Source};
pub use extract::{
    extract_objects, CarryableGazetteer, ExtractorConfig, ObjectExtractor, PatternExtractor,
    RemoteExtractor, RemoteRequest, RemoteResponse, RemoteSpan, DEFAULT_NEGATIVE_HEADS,
    DEFAULT_POSITIVE_HEADS, DEFAULT_QUERY, DEFAULT_TRIGGER_VERBS,
};
pub use imperative::{is_imperative, VerbLexicon, VerbTagger};
pub use sentence::{split_sentences, Sentence, SentenceSource};
pub use tfidf::{ngram_counts, tfidf_baseline, vocabulary, TfIdfModel, MAX_NGRAM};

use crate::poi::Poi;
use crate::weather::{WeatherAdvice, WeatherRules};

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("extractor failed: {0}")]
    Extractor(String),
    #[error("bad extractor config: {0}")]
    BadConfig(String),
}

/// Items found in the imperative sentences, each with the sentence that
/// yielded it first. Item order follows sentence order.
pub fn mine_sentences(
    sentences: &[Sentence],
    verbs: &dyn VerbTagger,
    extractor: &dyn ObjectExtractor,
) -> Result<Vec<(String, Sentence)>, MiningError> {
    let mut found: Vec<(String, Sentence)> = Vec::new();
    for sentence in sentences.iter().filter(|s| is_imperative(s, verbs)) {
        for item in extract_objects(sentence, extractor)? {
            if !found.iter().any(|(name, _)| *name == item) {
                found.push((item, sentence.clone()));
            }
        }
    }
    Ok(found)
}

pub fn email_note_items(
    body: &str,
    verbs: &dyn VerbTagger,
    extractor: &dyn ObjectExtractor,
) -> Result<Vec<RecommendedItem>, MiningError> {
    let sentences = split_sentences(body, SentenceSource::Email);
    Ok(mine_sentences(&sentences, verbs, extractor)?
        .into_iter()
        .map(|(name, s)| RecommendedItem::new(&name, Source::EmailNote, s.text))
        .collect())
}

/// Mines every review of every POI. POIs are processed concurrently; the
/// output keeps POI order, then review order.
pub fn review_items(
    pois: &[Poi],
    verbs: &dyn VerbTagger,
    extractor: &dyn ObjectExtractor,
) -> Result<Vec<RecommendedItem>, MiningError> {
    let per_poi: Vec<Result<Vec<(String, Sentence)>, MiningError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pois
            .iter()
            .map(|poi| {
                scope.spawn(move || {
                    let sentences: Vec<Sentence> = poi
                        .reviews
                        .iter()
                        .flat_map(|r| {
                            split_sentences(
                                &r.text,
                                SentenceSource::Review {
                                    poi: poi.name.clone(),
                                },
                            )
                        })
                        .collect();
                    mine_sentences(&sentences, verbs, extractor)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mining thread panicked"))
            .collect()
    });
    let mut items = Vec::new();
    for found in per_poi {
        for (name, sentence) in found? {
            items.push(RecommendedItem::new(&name, Source::Review, sentence.text));
        }
    }
    Ok(RecommendationList::from_items(items).items)
}

/// Weather advice as recommended items, with the rule id as evidence.
pub fn weather_items(advice: &WeatherAdvice, rules: &WeatherRules) -> Vec<RecommendedItem> {
    advice
        .triggered_rules
        .iter()
        .flat_map(|rule| {
            rules
                .items(*rule)
                .iter()
                .map(move |item| RecommendedItem::new(item, Source::Weather, rule.id()))
        })
        .collect()
}
