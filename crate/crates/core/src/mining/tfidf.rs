use std::collections::{BTreeMap, HashMap, HashSet};

use super::MiningError;

pub const MAX_NGRAM: usize = 3;

/// Scores closer than this are ties and fall back to lexicographic order.
const SCORE_RESOLUTION: f64 = 1e-9;

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|w| w.trim_matches('\''))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Counts of every 1..=3-gram in the text.
pub fn ngram_counts(text: &str) -> HashMap<String, usize> {
    let words = words(text);
    let mut counts = HashMap::new();
    for n in 1..=MAX_NGRAM {
        for window in words.windows(n) {
            *counts.entry(window.join(" ")).or_insert(0) += 1;
        }
    }
    counts
}

/// Document frequencies over a review corpus. Scores use raw per-review term
/// counts and `idf = ln(N / df)`.
#[derive(Debug, Clone)]
pub struct TfIdfModel {
    docs: usize,
    df: HashMap<String, usize>,
}

impl TfIdfModel {
    pub fn fit<S: AsRef<str>>(corpus: &[S]) -> Result<Self, MiningError> {
        if corpus.is_empty() {
            return Err(MiningError::EmptyCorpus);
        }
        let mut df = HashMap::new();
        for doc in corpus {
            for term in ngram_counts(doc.as_ref()).into_keys() {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        Ok(Self {
            docs: corpus.len(),
            df,
        })
    }

    /// Zero for terms never seen while fitting.
    pub fn idf(&self, term: &str) -> f64 {
        match self.df.get(term) {
            Some(&df) => (self.docs as f64 / df as f64).ln(),
            None => 0.0,
        }
    }

    /// Top `k` n-grams of a single document by `count * idf`.
    pub fn top_k(&self, text: &str, k: usize) -> Vec<String> {
        let scored = ngram_counts(text)
            .into_iter()
            .map(|(term, count)| {
                let score = count as f64 * self.idf(&term);
                (term, score)
            })
            .collect();
        rank(scored, k)
    }
}

fn rank(scored: Vec<(String, f64)>, k: usize) -> Vec<String> {
    let mut keyed: Vec<(i64, String)> = scored
        .into_iter()
        .map(|(term, score)| ((score / SCORE_RESOLUTION).round() as i64, term))
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    keyed.into_iter().take(k).map(|(_, t)| t).collect()
}

/// Corpus-level top `k` n-grams (n ≤ 3). A term's score is its summed
/// per-review count times its idf; ties break lexicographically.
pub fn tfidf_baseline<S: AsRef<str>>(reviews: &[S], k: usize) -> Result<Vec<String>, MiningError> {
    let model = TfIdfModel::fit(reviews)?;
    let mut totals: BTreeMap<String, usize> = BTreeMap::new();
    for doc in reviews {
        for (term, count) in ngram_counts(doc.as_ref()) {
            *totals.entry(term).or_insert(0) += count;
        }
    }
    let scored = totals
        .into_iter()
        .map(|(term, count)| {
            let score = count as f64 * model.idf(&term);
            (term, score)
        })
        .collect();
    Ok(rank(scored, k))
}

/// Distinct terms across the corpus, for callers sizing `k`.
pub fn vocabulary<S: AsRef<str>>(reviews: &[S]) -> HashSet<String> {
    reviews
        .iter()
        .flat_map(|d| ngram_counts(d.as_ref()).into_keys())
        .collect()
}
