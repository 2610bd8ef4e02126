use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{
    apply_salient_mask, laplacian_variance, Backends, Detection, FallbackClassifier, Frame,
    PrimaryDetector, SalientSegmenter, TrackerConfig, TrackerError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrameStatus {
    RejectedBlur,
    PrimaryAccept,
    FallbackAccept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameVerdict {
    pub frame_index: usize,
    pub status: FrameStatus,
    /// Absent exactly when the frame was rejected as blurry.
    pub detection: Option<Detection>,
    pub blur_score: f64,
}

impl FrameVerdict {
    pub fn accepted_label(&self) -> Option<&str> {
        self.detection.as_ref().map(|d| d.label.as_str())
    }
}

fn backend_failure(frame: &Frame) -> impl Fn(String) -> TrackerError + '_ {
    move |message| TrackerError::BackendFailure {
        frame_index: frame.index,
        message,
    }
}

/// Runs one frame through the blur gate and the detector cascade.
pub fn process_frame(
    frame: &Frame,
    primary: &mut dyn PrimaryDetector,
    segmenter: &mut dyn SalientSegmenter,
    fallback: &mut dyn FallbackClassifier,
    cfg: &TrackerConfig,
) -> Result<FrameVerdict, TrackerError> {
    let blur_score = laplacian_variance(frame)?;
    if blur_score <= cfg.gamma {
        return Ok(FrameVerdict {
            frame_index: frame.index,
            status: FrameStatus::RejectedBlur,
            detection: None,
            blur_score,
        });
    }
    let best = primary
        .detect(frame)
        .map_err(backend_failure(frame))?
        .into_iter()
        .max_by(|a, b| a.confidence.total_cmp(&b.confidence));
    if let Some(d) = best {
        if primary.known_categories().contains(&d.label) && d.confidence > cfg.delta {
            return Ok(FrameVerdict {
                frame_index: frame.index,
                status: FrameStatus::PrimaryAccept,
                detection: Some(d),
                blur_score,
            });
        }
    }
    let mask = segmenter.segment(frame).map_err(backend_failure(frame))?;
    let mixed = apply_salient_mask(frame, &mask)?;
    let detection = fallback.classify(&mixed).map_err(backend_failure(frame))?;
    Ok(FrameVerdict {
        frame_index: frame.index,
        status: FrameStatus::FallbackAccept,
        detection: Some(detection),
        blur_score,
    })
}

/// Streaming quorum-in-window smoother over accepted labels.
///
/// A label is confirmed once it fills `quorum` slots of the last `window`
/// accepted verdicts; until `window` verdicts have arrived the whole prefix
/// is the window. Confirmation never reverts.
#[derive(Debug, Clone)]
pub struct Smoother {
    window: usize,
    quorum: usize,
    recent: VecDeque<String>,
    counts: HashMap<String, usize>,
    confirmed: BTreeSet<String>,
}

impl Smoother {
    pub fn new(cfg: &TrackerConfig) -> Self {
        Self {
            window: cfg.window.max(1),
            quorum: cfg.quorum.max(1),
            recent: VecDeque::with_capacity(cfg.window),
            counts: HashMap::new(),
            confirmed: BTreeSet::new(),
        }
    }

    /// Feeds one verdict; returns the label if this verdict confirmed it.
    pub fn push(&mut self, verdict: &FrameVerdict) -> Option<String> {
        let label = verdict.accepted_label()?.to_owned();
        if self.recent.len() == self.window {
            let old = self.recent.pop_front().expect("window is non-empty");
            if let Some(c) = self.counts.get_mut(&old) {
                *c -= 1;
            }
        }
        self.recent.push_back(label.clone());
        let count = self.counts.entry(label.clone()).or_default();
        *count += 1;
        (*count >= self.quorum && self.confirmed.insert(label.clone())).then_some(label)
    }

    pub fn confirmed(&self) -> &BTreeSet<String> {
        &self.confirmed
    }
}

pub fn smooth_predictions<'a>(
    verdicts: impl IntoIterator<Item = &'a FrameVerdict>,
    cfg: &TrackerConfig,
) -> BTreeSet<String> {
    let mut smoother = Smoother::new(cfg);
    for v in verdicts {
        smoother.push(v);
    }
    smoother.confirmed
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionProgress {
    pub accepted: usize,
    pub rejected_blur: usize,
    pub confirmed: BTreeSet<String>,
}

/// Ordered verdicts of one packing run plus the labels confirmed so far.
#[derive(Debug, Clone)]
pub struct PackingSession {
    config: TrackerConfig,
    verdicts: Vec<FrameVerdict>,
    smoother: Smoother,
}

impl PackingSession {
    pub fn new(config: TrackerConfig) -> Result<Self, TrackerError> {
        config.validate()?;
        Ok(Self {
            smoother: Smoother::new(&config),
            config,
            verdicts: Vec::new(),
        })
    }

    /// Rebuilds a session from a recorded verdict trace.
    pub fn from_verdicts(
        config: TrackerConfig,
        verdicts: impl IntoIterator<Item = FrameVerdict>,
    ) -> Result<Self, TrackerError> {
        let mut session = Self::new(config)?;
        for v in verdicts {
            session.record(v);
        }
        Ok(session)
    }

    pub fn record(&mut self, verdict: FrameVerdict) {
        self.smoother.push(&verdict);
        self.verdicts.push(verdict);
    }

    /// Processes frames in order. On a backend failure the verdicts of
    /// earlier frames in the batch are kept.
    pub fn ingest<'f>(
        &mut self,
        frames: impl IntoIterator<Item = &'f Frame>,
        backends: &mut Backends,
    ) -> Result<Vec<FrameVerdict>, TrackerError> {
        let mut produced = Vec::new();
        for frame in frames {
            let verdict = process_frame(
                frame,
                backends.primary.as_mut(),
                backends.segmenter.as_mut(),
                backends.fallback.as_mut(),
                &self.config,
            )?;
            self.record(verdict.clone());
            produced.push(verdict);
        }
        Ok(produced)
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn verdicts(&self) -> &[FrameVerdict] {
        &self.verdicts
    }

    pub fn confirmed(&self) -> &BTreeSet<String> {
        self.smoother.confirmed()
    }

    pub fn progress(&self) -> SessionProgress {
        let rejected_blur = self
            .verdicts
            .iter()
            .filter(|v| v.status == FrameStatus::RejectedBlur)
            .count();
        SessionProgress {
            accepted: self.verdicts.len() - rejected_blur,
            rejected_blur,
            confirmed: self.confirmed().clone(),
        }
    }
}
