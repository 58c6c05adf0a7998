//! Replay of recorded detector output.
//!
//! Store format, one detection per line:
//!
//! ```text
//! <stem> <label> <confidence> <x0> <y0> <x1> <y1>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use super::{DetectError, Detection, Detector, Frame};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("fixture store line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Recorded detections keyed by image file stem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FixtureStore {
    entries: BTreeMap<String, Vec<Detection>>,
}

impl FixtureStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, stem: &str, detections: impl IntoIterator<Item = Detection>) {
        self.entries.entry(stem.to_string()).or_default().extend(detections);
    }

    pub fn get(&self, stem: &str) -> Option<&[Detection]> {
        self.entries.get(stem).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let mut store = FixtureStore::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let malformed = |reason: String| FixtureError::Malformed { line: i + 1, reason };
            let (stem, rest) = fields.split_first().ok_or_else(|| malformed("empty record".into()))?;
            let det = Detection::from_fields(rest).map_err(malformed)?;
            store.entries.entry(stem.to_string()).or_default().push(det);
        }
        Ok(store)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (stem, dets) in &self.entries {
            for d in dets {
                out.push_str(stem);
                out.push(' ');
                out.push_str(&d.to_fields());
                out.push('\n');
            }
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, FixtureError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_text())
    }
}

/// Detector that returns the stored detections for the frame's file stem.
#[derive(Debug, Clone)]
pub struct FixtureDetector {
    store: FixtureStore,
}

impl FixtureDetector {
    pub fn new(store: FixtureStore) -> Self {
        FixtureDetector { store }
    }

    pub fn open(path: &Path) -> Result<Self, FixtureError> {
        FixtureStore::load(path).map(Self::new)
    }
}

impl Detector for FixtureDetector {
    fn name(&self) -> &str {
        "fixture"
    }

    fn detect(&self, frame: &Frame<'_>) -> Result<Vec<Detection>, DetectError> {
        let stem = frame.path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        match self.store.get(stem) {
            Some(dets) => Ok(dets.to_vec()),
            None => {
                log::warn!("fixture store has no entry for {stem:?}");
                Ok(Vec::new())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{BoundingBox, Label};
    use crate::imaging::ImageBuffer;

    fn frame_for<'a>(path: &'a Path, image: &'a ImageBuffer) -> Frame<'a> {
        Frame { path, image }
    }

    #[test]
    fn replays_verbatim() {
        let store =
            FixtureStore::parse("# recorded\nm1 5 0.05 1 2 3 4\nm1 7 0.9 5 2 9 4\n\nm2 dot 0.5 0 0 1 1\n").unwrap();
        let det = FixtureDetector::new(store);
        let img = ImageBuffer::filled(2, 2, [0; 3]).unwrap();
        let got = det.detect(&frame_for(Path::new("data/m1.ppm"), &img)).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0], Detection::digit(5, 0.05, BoundingBox::new(1.0, 2.0, 3.0, 4.0)));
        assert_eq!(got[1].label, Label::Digit(7));
        let other = det.detect(&frame_for(Path::new("m2.ppm"), &img)).unwrap();
        assert_eq!(other[0].label, Label::Other("dot".into()));
    }

    #[test]
    fn miss_is_empty() {
        let det = FixtureDetector::new(FixtureStore::new());
        let img = ImageBuffer::filled(2, 2, [0; 3]).unwrap();
        assert!(det.detect(&frame_for(Path::new("absent.ppm"), &img)).unwrap().is_empty());
    }

    #[test]
    fn malformed_lines_are_located() {
        let err = FixtureStore::parse("a 1 0.5 0 0 1 1\nb 1 0.5 0 0 1\n").unwrap_err();
        assert!(matches!(err, FixtureError::Malformed { line: 2, .. }));
        let err = FixtureStore::parse("a 1 1.5 0 0 1 1\n").unwrap_err();
        assert!(matches!(err, FixtureError::Malformed { line: 1, .. }));
    }

    #[test]
    fn store_text_is_a_fixed_point() {
        let mut store = FixtureStore::new();
        store.insert(
            "meter_003",
            [
                Detection::digit(3, 0.1 + 0.2, BoundingBox::new(0.5, 1.0 / 3.0, 10.25, 20.0)),
                Detection::digit(8, 1.0, BoundingBox::new(11.0, 1.0, 20.0, 20.0)),
            ],
        );
        let text = store.to_text();
        let parsed = FixtureStore::parse(&text).unwrap();
        assert_eq!(parsed, store);
        assert_eq!(parsed.to_text(), text);
    }
}
