//! Runs a detector over manifest entries and scores each image.

use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};

use thiserror::Error;

use super::{round_ms, EvalRecord};
use crate::dataset::ManifestEntry;
use crate::detector::{timed_detect, Detector, Frame};
use crate::exec::Executor;
use crate::imaging::{load_image, DatasetTag, ImageError};
use crate::postprocess::{
    assemble_reading, filter_detections, is_correct, CompareMode, ConfigError, ConfigTable, FilterParams,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("loading {file:?}: {source}")]
    Image {
        file: String,
        #[source]
        source: ImageError,
    },
    #[error("{file:?}: {source}")]
    Config {
        file: String,
        #[source]
        source: ConfigError,
    },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HarnessOptions {
    pub filter: FilterParams,
    pub compare: CompareMode,
}

/// Scored result for one image, with diagnostic notes that do not belong
/// in the CSV (`no_detections`, `position_mismatch`, detector errors).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageOutcome {
    pub tag: DatasetTag,
    pub record: EvalRecord,
    pub notes: Vec<String>,
}

/// Counting semaphore bounding concurrent `detect` calls.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn new(slots: usize) -> Self {
        Gate { free: Mutex::new(slots.max(1)), cv: Condvar::new() }
    }

    fn run<R>(&self, f: impl FnOnce() -> R) -> R {
        {
            let mut free = self.cv.wait_while(self.free.lock().unwrap(), |n| *n == 0).unwrap();
            *free -= 1;
        }
        let out = f();
        *self.free.lock().unwrap() += 1;
        self.cv.notify_one();
        out
    }
}

fn evaluate(
    detector: &dyn Detector,
    entry: &ManifestEntry,
    images_dir: &Path,
    configs: &ConfigTable,
    opts: &HarnessOptions,
    gate: Option<&Gate>,
) -> Result<ImageOutcome, HarnessError> {
    let config = configs
        .get(&entry.meter_config_id)
        .map_err(|source| HarnessError::Config { file: entry.file_name.clone(), source })?;
    let path: PathBuf = images_dir.join(&entry.file_name);
    let image = load_image(&path).map_err(|source| HarnessError::Image { file: entry.file_name.clone(), source })?;
    let frame = Frame { path: &path, image: &image };
    let (result, ms) = match gate {
        Some(g) => g.run(|| timed_detect(detector, &frame)),
        None => timed_detect(detector, &frame),
    };

    let mut notes = Vec::new();
    let filtered = match result {
        Ok(raw) => {
            let reading = assemble_reading(&filter_detections(&raw, &opts.filter), config);
            if reading.no_detections {
                notes.push("no_detections".to_string());
            } else if reading.position_mismatch {
                notes.push("position_mismatch".to_string());
            }
            reading.text().to_string()
        }
        Err(e) => {
            notes.push(format!("error: {e}"));
            String::new()
        }
    };
    let correct = is_correct(&filtered, &entry.expected_reading, opts.compare);
    Ok(ImageOutcome {
        tag: entry.tag,
        record: EvalRecord {
            file_name: entry.file_name.clone(),
            infer_time_ms: round_ms(ms),
            filtered_reading: filtered,
            expected_reading: entry.expected_reading.clone(),
            is_correct: correct,
        },
        notes,
    })
}

/// Detect, filter, assemble and score a single manifest entry. Detector
/// failures become an error note on an incorrect record; only harness
/// problems (unreadable image, unknown config) are returned as errors.
pub fn evaluate_entry(
    detector: &dyn Detector,
    entry: &ManifestEntry,
    images_dir: &Path,
    configs: &ConfigTable,
    opts: &HarnessOptions,
) -> Result<ImageOutcome, HarnessError> {
    evaluate(detector, entry, images_dir, configs, opts, None)
}

/// Evaluates entries on `exec`, honoring the detector's concurrency limit.
/// Outcomes come back in entry order.
pub fn evaluate_dataset(
    detector: &dyn Detector,
    entries: &[ManifestEntry],
    images_dir: &Path,
    configs: &ConfigTable,
    opts: &HarnessOptions,
    exec: &Executor,
) -> Result<Vec<ImageOutcome>, HarnessError> {
    let gate = detector.concurrency_limit().map(Gate::new);
    exec.try_map(entries, |e| evaluate(detector, e, images_dir, configs, opts, gate.as_ref()))
}
