//! Scoring: exact-match accuracy, inference time, result CSVs and summaries.

mod csv_io;
mod harness;
mod summary;

pub use csv_io::{parse_csv, read_csv, write_csv, write_csv_to, CSV_HEADER};
pub use harness::{evaluate_dataset, evaluate_entry, HarnessError, HarnessOptions, ImageOutcome};
pub use summary::{
    format_summary_table, parse_result_file_name, read_summary_csv, result_file_name, summarize, write_summary_csv,
    DatasetSummary, SummaryRow,
};

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("cannot score an empty record list")]
    Empty,
}

/// One (image, detector) outcome, the unit of the result CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub file_name: String,
    pub infer_time_ms: f64,
    pub filtered_reading: String,
    pub expected_reading: String,
    pub is_correct: bool,
}

/// Exact-match accuracy `correct / total * 100`, kept as a rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Accuracy {
    correct: u64,
    total: u64,
}

impl Accuracy {
    pub fn new(correct: u64, total: u64) -> Result<Self, EvalError> {
        if total == 0 {
            return Err(EvalError::Empty);
        }
        assert!(correct <= total, "correct count {correct} exceeds total {total}");
        Ok(Accuracy { correct, total })
    }

    pub fn correct(&self) -> u64 {
        self.correct
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn percent(&self) -> Ratio<u64> {
        Ratio::new(self.correct * 100, self.total)
    }

    pub fn percent_f64(&self) -> f64 {
        self.correct as f64 * 100.0 / self.total as f64
    }

    /// Percent rounded half away from zero to hundredths, e.g. `36.67`.
    pub fn display(&self) -> String {
        let (n, d) = (self.correct as u128 * 10_000, self.total as u128);
        let hundredths = (2 * n + d) / (2 * d);
        format!("{}.{:02}", hundredths / 100, hundredths % 100)
    }
}

impl fmt::Display for Accuracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

pub fn accuracy(records: &[EvalRecord]) -> Result<Accuracy, EvalError> {
    let correct = records.iter().filter(|r| r.is_correct).count() as u64;
    Accuracy::new(correct, records.len() as u64)
}

/// Arithmetic mean of inference times, accumulated as a running mean over
/// the sorted values: independent of record order and exact for constant
/// inputs.
pub fn mean_inference_time(records: &[EvalRecord]) -> Result<f64, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut times: Vec<f64> = records.iter().map(|r| r.infer_time_ms).collect();
    times.sort_by(f64::total_cmp);
    let mut mean = 0.0;
    for (k, t) in times.iter().enumerate() {
        mean += (t - mean) / (k + 1) as f64;
    }
    Ok(mean)
}

/// Rounds a millisecond timing to the three decimals the CSV carries.
pub fn round_ms(ms: f64) -> f64 {
    (ms.max(0.0) * 1000.0).round() / 1000.0
}
