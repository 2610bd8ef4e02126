//! Precision/recall of item extractors against annotated reviews, and the
//! method comparison report.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mining::{
    is_imperative, split_sentences, ObjectExtractor, PatternExtractor, SentenceSource, TfIdfModel,
    VerbLexicon, VerbTagger,
};
use crate::text::normalize_name;

/// Column order of the baseline comparison report.
pub const REPORT_COLUMN_ORDER: &[&str] = &[
    "LDA",
    "Tf-idf",
    "Popular Mentions",
    "QnA",
    "Spacy NER",
    "Our approach",
];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus line {line}: {message}")]
    BadCorpus { line: usize, message: String },
    #[error("method {method} failed: {message}")]
    Method { method: String, message: String },
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::EmptyCorpus => "EMPTY_CORPUS",
            EvalError::BadCorpus { .. } => "BAD_CORPUS",
            EvalError::Method { .. } => "METHOD_FAILURE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedReview {
    pub text: String,
    pub ground_truth: BTreeSet<String>,
}

impl AnnotatedReview {
    pub fn new<S: AsRef<str>>(text: impl Into<String>, ground_truth: &[S]) -> Self {
        Self {
            text: text.into(),
            ground_truth: ground_truth
                .iter()
                .map(|s| normalize_name(s.as_ref()))
                .collect(),
        }
    }
}

/// Reads `{"text": .., "ground_truth": [..]}` records, one per line.
pub fn load_corpus(contents: &str) -> Result<Vec<AnnotatedReview>, EvalError> {
    contents
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str::<AnnotatedReview>(line)
                .map(|r| {
                    AnnotatedReview::new(r.text, &r.ground_truth.into_iter().collect::<Vec<_>>())
                })
                .map_err(|e| EvalError::BadCorpus {
                    line: i + 1,
                    message: e.to_string(),
                })
        })
        .collect()
}

fn normalized(items: &[String]) -> BTreeSet<String> {
    items
        .iter()
        .map(|s| normalize_name(s))
        .filter(|s| !s.is_empty())
        .collect()
}

/// `|pred ∩ gt| / |pred|`; 1 when both are empty, 0 when only `pred` is.
pub fn precision(pred: &BTreeSet<String>, gt: &BTreeSet<String>) -> f64 {
    if pred.is_empty() {
        return if gt.is_empty() { 1.0 } else { 0.0 };
    }
    pred.intersection(gt).count() as f64 / pred.len() as f64
}

/// `|pred ∩ gt| / |gt|`; 1 when `gt` is empty.
pub fn recall(pred: &BTreeSet<String>, gt: &BTreeSet<String>) -> f64 {
    if gt.is_empty() {
        return 1.0;
    }
    pred.intersection(gt).count() as f64 / gt.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Averaging {
    /// Mean of per-document values over documents with ground truth.
    #[default]
    Macro,
    /// Ratios of summed counts over the corpus.
    Micro,
}

/// A named item extractor evaluated over a whole corpus at once, so that
/// corpus-fitted baselines can see every document.
pub trait Method: Send + Sync {
    fn name(&self) -> &str;
    fn predict_all(&self, texts: &[&str]) -> Result<Vec<Vec<String>>, String>;
}

/// Imperative filter followed by an object extractor, per sentence.
pub struct ImperativeMethod<V, E> {
    name: String,
    verbs: V,
    extractor: E,
}

impl<V: VerbTagger, E: ObjectExtractor> ImperativeMethod<V, E> {
    pub fn new(name: impl Into<String>, verbs: V, extractor: E) -> Self {
        Self {
            name: name.into(),
            verbs,
            extractor,
        }
    }

    fn predict(&self, text: &str) -> Result<Vec<String>, String> {
        let mut out: Vec<String> = Vec::new();
        for sentence in split_sentences(text, SentenceSource::Email) {
            if !is_imperative(&sentence, &self.verbs) {
                continue;
            }
            for item in self
                .extractor
                .extract(&sentence)
                .map_err(|e| e.to_string())?
            {
                if !out.contains(&item) {
                    out.push(item);
                }
            }
        }
        Ok(out)
    }
}

/// The default pipeline: bundled verb lexicon and pattern extractor.
pub fn pattern_method() -> ImperativeMethod<VerbLexicon, PatternExtractor> {
    ImperativeMethod::new(
        "Our approach",
        VerbLexicon::default(),
        PatternExtractor::default(),
    )
}

impl<V: VerbTagger, E: ObjectExtractor> Method for ImperativeMethod<V, E> {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict_all(&self, texts: &[&str]) -> Result<Vec<Vec<String>>, String> {
        texts.iter().map(|t| self.predict(t)).collect()
    }
}

/// Top-`k` n-grams per document, idf fitted on the evaluated corpus.
pub struct TfIdfMethod {
    pub k: usize,
}

impl Method for TfIdfMethod {
    fn name(&self) -> &str {
        "Tf-idf"
    }

    fn predict_all(&self, texts: &[&str]) -> Result<Vec<Vec<String>>, String> {
        let model = TfIdfModel::fit(texts).map_err(|e| e.to_string())?;
        Ok(texts.iter().map(|t| model.top_k(t, self.k)).collect())
    }
}

/// Predicts the same provider popular-mention tokens for every document.
pub struct PopularMentionsMethod {
    pub mentions: Vec<String>,
}

impl Method for PopularMentionsMethod {
    fn name(&self) -> &str {
        "Popular Mentions"
    }

    fn predict_all(&self, texts: &[&str]) -> Result<Vec<Vec<String>>, String> {
        Ok(vec![self.mentions.clone(); texts.len()])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentScore {
    pub document: usize,
    pub predicted: BTreeSet<String>,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: String,
    pub precision_pct: f64,
    pub recall_pct: f64,
    pub documents: Vec<DocumentScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub averaging: Averaging,
    pub methods: Vec<MethodScore>,
}

fn score_method(
    corpus: &[AnnotatedReview],
    predictions: Vec<Vec<String>>,
    name: &str,
    averaging: Averaging,
) -> MethodScore {
    let documents: Vec<DocumentScore> = corpus
        .iter()
        .zip(predictions)
        .enumerate()
        .map(|(document, (doc, pred))| {
            let predicted = normalized(&pred);
            DocumentScore {
                document,
                precision: precision(&predicted, &doc.ground_truth),
                recall: recall(&predicted, &doc.ground_truth),
                predicted,
            }
        })
        .collect();
    let (p, r) = match averaging {
        Averaging::Macro => {
            let mut scored: Vec<&DocumentScore> = documents
                .iter()
                .filter(|d| !corpus[d.document].ground_truth.is_empty())
                .collect();
            if scored.is_empty() {
                scored = documents.iter().collect();
            }
            let n = scored.len() as f64;
            (
                scored.iter().map(|d| d.precision).sum::<f64>() / n,
                scored.iter().map(|d| d.recall).sum::<f64>() / n,
            )
        }
        Averaging::Micro => {
            let (mut hit, mut pred, mut gt) = (0usize, 0usize, 0usize);
            for d in &documents {
                let truth = &corpus[d.document].ground_truth;
                hit += d.predicted.intersection(truth).count();
                pred += d.predicted.len();
                gt += truth.len();
            }
            let p = match (pred, gt) {
                (0, 0) => 1.0,
                (0, _) => 0.0,
                _ => hit as f64 / pred as f64,
            };
            let r = if gt == 0 { 1.0 } else { hit as f64 / gt as f64 };
            (p, r)
        }
    };
    MethodScore {
        method: name.to_owned(),
        precision_pct: p * 100.0,
        recall_pct: r * 100.0,
        documents,
    }
}

fn column_rank(name: &str) -> usize {
    REPORT_COLUMN_ORDER
        .iter()
        .position(|c| c.eq_ignore_ascii_case(name))
        .unwrap_or(REPORT_COLUMN_ORDER.len())
}

/// Runs every method over the corpus (methods concurrently) and scores
/// them. Known baseline names are ordered by `REPORT_COLUMN_ORDER`; other
/// methods follow in the given order.
pub fn run_comparison(
    corpus: &[AnnotatedReview],
    methods: &[&dyn Method],
    averaging: Averaging,
) -> Result<MetricsReport, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let texts: Vec<&str> = corpus.iter().map(|d| d.text.as_str()).collect();
    let outputs: Vec<Result<Vec<Vec<String>>, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|m| {
                let texts = &texts;
                scope.spawn(move || m.predict_all(texts))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("method thread panicked"))
            .collect()
    });
    let mut scores = Vec::with_capacity(methods.len());
    for (method, output) in methods.iter().zip(outputs) {
        let predictions = output.map_err(|message| EvalError::Method {
            method: method.name().to_owned(),
            message,
        })?;
        if predictions.len() != corpus.len() {
            return Err(EvalError::Method {
                method: method.name().to_owned(),
                message: format!(
                    "{} predictions for {} documents",
                    predictions.len(),
                    corpus.len()
                ),
            });
        }
        scores.push(score_method(corpus, predictions, method.name(), averaging));
    }
    scores.sort_by_key(|s| column_rank(&s.method));
    Ok(MetricsReport {
        averaging,
        methods: scores,
    })
}

impl MetricsReport {
    /// Aligned plain-text table: one row per method.
    pub fn render_text(&self) -> String {
        let width = self
            .methods
            .iter()
            .map(|m| m.method.len())
            .chain(["Approach".len()])
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}",
            "Approach", "Precision", "Recall"
        );
        for m in &self.methods {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8.2}%  {:>8.2}%",
                m.method, m.precision_pct, m.recall_pct
            );
        }
        let _ = writeln!(out, "({:?} average)", self.averaging);
        out
    }

    /// One JSON object per method and document.
    pub fn json_rows(&self) -> Vec<serde_json::Value> {
        self.methods
            .iter()
            .flat_map(|m| {
                m.documents.iter().map(move |d| {
                    serde_json::json!({
                        "method": m.method,
                        "document": d.document,
                        "predicted": d.predicted,
                        "precision": d.precision,
                        "recall": d.recall,
                    })
                })
            })
            .collect()
    }
}
