use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Frame, Mask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Backend {
    Primary,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub label: String,
    pub confidence: f64,
    pub backend: Backend,
}

/// Object detector with a closed label set.
pub trait PrimaryDetector: Send {
    /// Zero or more detections; the highest-confidence one is used.
    fn detect(&mut self, frame: &Frame) -> Result<Vec<Detection>, String>;
    fn known_categories(&self) -> &HashSet<String>;
}

/// Produces a binary mask of the dominant object in a frame.
pub trait SalientSegmenter: Send {
    fn segment(&mut self, frame: &Frame) -> Result<Mask, String>;
}

/// Classifies a masked color frame.
pub trait FallbackClassifier: Send {
    fn classify(&mut self, frame: &Frame) -> Result<Detection, String>;
}

/// The three backends a packing session runs frames through.
pub struct Backends {
    pub primary: Box<dyn PrimaryDetector>,
    pub segmenter: Box<dyn SalientSegmenter>,
    pub fallback: Box<dyn FallbackClassifier>,
}

/// One scripted detector output.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptRecord {
    pub frame_index: usize,
    pub label: String,
    pub confidence: f64,
}

/// Parses `frame_index,label,confidence` lines ('#' comments allowed).
pub fn parse_script(contents: &str) -> Result<Vec<ScriptRecord>, String> {
    crate::text::data_lines(contents)
        .map(|line| {
            let mut parts = line.splitn(3, ',').map(str::trim);
            let (Some(index), Some(label), Some(confidence)) =
                (parts.next(), parts.next(), parts.next())
            else {
                return Err(format!("expected index,label,confidence: {line:?}"));
            };
            let frame_index = index
                .parse()
                .map_err(|_| format!("bad frame index in {line:?}"))?;
            let confidence: f64 = confidence
                .parse()
                .map_err(|_| format!("bad confidence in {line:?}"))?;
            if !(0.0..=1.0).contains(&confidence) || label.is_empty() {
                return Err(format!("bad record {line:?}"));
            }
            Ok(ScriptRecord {
                frame_index,
                label: label.to_owned(),
                confidence,
            })
        })
        .collect()
}

fn by_frame(records: Vec<ScriptRecord>) -> HashMap<usize, Vec<ScriptRecord>> {
    let mut map: HashMap<usize, Vec<ScriptRecord>> = HashMap::new();
    for r in records {
        map.entry(r.frame_index).or_default().push(r);
    }
    map
}

/// Primary detector replaying scripted records keyed by frame index.
/// Frames without a record produce no detection.
#[derive(Debug, Clone)]
pub struct ScriptedDetector {
    records: HashMap<usize, Vec<ScriptRecord>>,
    known: HashSet<String>,
    calls: usize,
}

impl ScriptedDetector {
    pub fn new(records: Vec<ScriptRecord>, known: impl IntoIterator<Item = String>) -> Self {
        Self {
            records: by_frame(records),
            known: known.into_iter().collect(),
            calls: 0,
        }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl PrimaryDetector for ScriptedDetector {
    fn detect(&mut self, frame: &Frame) -> Result<Vec<Detection>, String> {
        self.calls += 1;
        Ok(self
            .records
            .get(&frame.index)
            .into_iter()
            .flatten()
            .map(|r| Detection {
                label: r.label.clone(),
                confidence: r.confidence,
                backend: Backend::Primary,
            })
            .collect())
    }

    fn known_categories(&self) -> &HashSet<String> {
        &self.known
    }
}

/// Fallback classifier replaying scripted labels; unscripted frames are
/// classified as `unknown` with zero confidence.
#[derive(Debug, Clone)]
pub struct ScriptedClassifier {
    records: HashMap<usize, Vec<ScriptRecord>>,
    calls: usize,
}

pub const UNKNOWN_LABEL: &str = "unknown";

impl ScriptedClassifier {
    pub fn new(records: Vec<ScriptRecord>) -> Self {
        Self {
            records: by_frame(records),
            calls: 0,
        }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl FallbackClassifier for ScriptedClassifier {
    fn classify(&mut self, frame: &Frame) -> Result<Detection, String> {
        self.calls += 1;
        let best = self.records.get(&frame.index).and_then(|rs| {
            rs.iter()
                .max_by(|a, b| a.confidence.total_cmp(&b.confidence))
        });
        Ok(match best {
            Some(r) => Detection {
                label: r.label.clone(),
                confidence: r.confidence,
                backend: Backend::Fallback,
            },
            None => Detection {
                label: UNKNOWN_LABEL.into(),
                confidence: 0.0,
                backend: Backend::Fallback,
            },
        })
    }
}

/// Marks pixels at or above a luminance threshold as foreground.
#[derive(Debug, Clone, Default)]
pub struct ThresholdSegmenter {
    pub threshold: u8,
    calls: usize,
}

impl ThresholdSegmenter {
    pub fn new(threshold: u8) -> Self {
        Self {
            threshold,
            calls: 0,
        }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl SalientSegmenter for ThresholdSegmenter {
    fn segment(&mut self, frame: &Frame) -> Result<Mask, String> {
        self.calls += 1;
        Ok(Mask {
            width: frame.width(),
            height: frame.height(),
            bits: frame.gray().iter().map(|&g| g >= self.threshold).collect(),
        })
    }
}
