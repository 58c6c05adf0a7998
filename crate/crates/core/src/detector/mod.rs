//! Detector contract and reference detectors.
//!
//! A detector turns an image into raw symbol detections. Everything
//! downstream of that (confidence cutoff, deduplication, ordering) lives in
//! [`crate::postprocess`], so detectors report every candidate they find.

mod external;
mod fixture;
mod template;

pub use external::{parse_wire_output, ExternalDetector, DEFAULT_TIMEOUT};
pub use fixture::{FixtureDetector, FixtureStore};
pub use template::{TemplateDetector, DEFAULT_SCORE_FLOOR};

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::imaging::ImageBuffer;

/// Class label of a detection. Digits are the only classes that contribute
/// to a reading; any other label is carried through and later discarded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Digit(u8),
    Other(String),
}

impl Label {
    pub fn digit(&self) -> Option<u8> {
        match self {
            Label::Digit(d) => Some(*d),
            Label::Other(_) => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Digit(d) => write!(f, "{d}"),
            Label::Other(s) => f.write_str(s),
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.as_bytes() {
            [] => Err("empty label".into()),
            [d @ b'0'..=b'9'] => Ok(Label::Digit(d - b'0')),
            _ if s.chars().any(char::is_whitespace) => Err(format!("label {s:?} contains whitespace")),
            _ => Ok(Label::Other(s.to_string())),
        }
    }
}

/// Axis-aligned box in pixel coordinates, `x0 < x1` and `y0 < y1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BoundingBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        BoundingBox { x0, y0, x1, y1 }
    }

    pub fn is_valid(&self) -> bool {
        [self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite()) && self.x0 < self.x1 && self.y0 < self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center_x(&self) -> f64 {
        (self.x0 + self.x1) / 2.0
    }

    pub fn center_y(&self) -> f64 {
        (self.y0 + self.y1) / 2.0
    }

    pub fn intersection(&self, other: &BoundingBox) -> f64 {
        let w = (self.x1.min(other.x1) - self.x0.max(other.x0)).max(0.0);
        let h = (self.y1.min(other.y1) - self.y0.max(other.y0)).max(0.0);
        w * h
    }

    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let inter = self.intersection(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    pub fn within(&self, width: u32, height: u32) -> bool {
        self.x0 >= 0.0 && self.y0 >= 0.0 && self.x1 <= width as f64 && self.y1 <= height as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub label: Label,
    pub confidence: f64,
    pub bbox: BoundingBox,
}

impl Detection {
    pub fn new(label: Label, confidence: f64, bbox: BoundingBox) -> Result<Self, String> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(format!("confidence {confidence} outside [0, 1]"));
        }
        if !bbox.is_valid() {
            return Err(format!("degenerate box ({}, {}, {}, {})", bbox.x0, bbox.y0, bbox.x1, bbox.y1));
        }
        Ok(Detection { label, confidence, bbox })
    }

    pub fn digit(d: u8, confidence: f64, bbox: BoundingBox) -> Self {
        Detection { label: Label::Digit(d), confidence, bbox }
    }

    /// Parses `label confidence x0 y0 x1 y1` from whitespace-separated fields.
    pub(crate) fn from_fields(fields: &[&str]) -> Result<Self, String> {
        let [label, conf, x0, y0, x1, y1] = fields else {
            return Err(format!("expected 6 fields, found {}", fields.len()));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("not a number: {s:?}"));
        Detection::new(label.parse()?, num(conf)?, BoundingBox::new(num(x0)?, num(y0)?, num(x1)?, num(y1)?))
    }

    /// `label confidence x0 y0 x1 y1` with shortest round-trip float formatting.
    pub fn to_fields(&self) -> String {
        let b = &self.bbox;
        format!("{} {} {} {} {} {}", self.label, self.confidence, b.x0, b.y0, b.x1, b.y1)
    }
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("failed to start detector process: {0}")]
    Spawn(#[source] std::io::Error),
    #[error("detector exited with {status}: {stderr}")]
    ExitStatus { status: String, stderr: String },
    #[error("detector timed out after {0:?}")]
    Timeout(Duration),
    #[error("malformed detector output at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("{0}")]
    Internal(String),
}

/// One image handed to a detector, together with the path it was loaded from.
#[derive(Debug, Clone, Copy)]
pub struct Frame<'a> {
    pub path: &'a Path,
    pub image: &'a ImageBuffer,
}

pub trait Detector: Send + Sync {
    /// Short identifier used in output file names.
    fn name(&self) -> &str;

    fn detect(&self, frame: &Frame<'_>) -> Result<Vec<Detection>, DetectError>;

    /// Maximum number of concurrent `detect` calls, `None` for unlimited.
    fn concurrency_limit(&self) -> Option<usize> {
        None
    }
}

/// Detections plus wall-clock time of the detect call.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub detections: Vec<Detection>,
    pub inference_ms: f64,
}

/// Runs `detect` under a monotonic clock.
pub fn timed_detect(detector: &dyn Detector, frame: &Frame<'_>) -> (Result<Vec<Detection>, DetectError>, f64) {
    let start = Instant::now();
    let res = detector.detect(frame);
    (res, start.elapsed().as_secs_f64() * 1000.0)
}
