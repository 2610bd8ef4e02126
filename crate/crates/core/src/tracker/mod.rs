//! Packing verification: blur gating, the detector cascade, smoothing of
//! per-frame predictions and missed-item computation.

mod backends;
mod frame;
mod laplacian;
mod missed;
mod session;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use backends::{
    parse_script, Backend, Backends, Detection, FallbackClassifier, PrimaryDetector,
    SalientSegmenter, ScriptRecord, ScriptedClassifier, ScriptedDetector, ThresholdSegmenter,
    UNKNOWN_LABEL,
};
pub use frame::{apply_salient_mask, load_manifest, Frame, Mask};
pub use laplacian::laplacian_variance;
pub use missed::{missed_items, LabelSynonyms};
pub use session::{
    process_frame, smooth_predictions, FrameStatus, FrameVerdict, PackingSession, SessionProgress,
    Smoother,
};

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("frame is {width}x{height}, need at least 3x3")]
    FrameTooSmall { width: usize, height: usize },
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error("mask is {}x{}, frame is {}x{}", mask.0, mask.1, frame.0, frame.1)]
    DimensionMismatch {
        frame: (usize, usize),
        mask: (usize, usize),
    },
    #[error("backend failed on frame {frame_index}: {message}")]
    BackendFailure { frame_index: usize, message: String },
    #[error("invalid tracker config: {0}")]
    BadConfig(String),
}

impl TrackerError {
    pub fn code(&self) -> &'static str {
        match self {
            TrackerError::FrameTooSmall { .. } => "FRAME_TOO_SMALL",
            TrackerError::MalformedFrame(_) => "MALFORMED_FRAME",
            TrackerError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            TrackerError::BackendFailure { .. } => "BACKEND_FAILURE",
            TrackerError::BadConfig(_) => "BAD_CONFIG",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Frames with Laplacian variance at or below this are dropped as blurry.
    pub gamma: f64,
    /// Primary detections need confidence strictly above this.
    pub delta: f64,
    pub window: usize,
    pub quorum: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            gamma: 40.0,
            delta: 0.7,
            window: 15,
            quorum: 8,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), TrackerError> {
        if self.gamma.is_nan() || self.gamma < 0.0 {
            return Err(TrackerError::BadConfig(format!("gamma {} < 0", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(TrackerError::BadConfig(format!(
                "delta {} outside [0,1]",
                self.delta
            )));
        }
        if self.quorum < 1 || self.quorum > self.window {
            return Err(TrackerError::BadConfig(format!(
                "need 1 <= quorum ({}) <= window ({})",
                self.quorum, self.window
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(TrackerConfig::default().validate().is_ok());
        let bad = [
            TrackerConfig {
                gamma: -1.0,
                ..Default::default()
            },
            TrackerConfig {
                delta: 1.5,
                ..Default::default()
            },
            TrackerConfig {
                quorum: 0,
                ..Default::default()
            },
            TrackerConfig {
                quorum: 16,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert_eq!(cfg.validate().unwrap_err().code(), "BAD_CONFIG");
        }
    }

    #[test]
    fn config_from_partial_toml() {
        let cfg: TrackerConfig = toml::from_str("delta = 0.5").unwrap();
        assert_eq!(cfg.delta, 0.5);
        assert_eq!(cfg.window, 15);
    }

    #[test]
    fn laplacian_of_constant_frame_is_zero() {
        let f = Frame::from_gray(0, 5, 4, vec![128; 20]).unwrap();
        assert_eq!(laplacian_variance(&f).unwrap(), 0.0);
    }
}
