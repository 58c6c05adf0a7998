use std::fmt;

use super::MeterConfig;
use crate::detector::Detection;

/// An assembled reading plus flags describing how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Reading {
    text: String,
    /// Token count differed from the register's digit positions.
    pub position_mismatch: bool,
    /// No digit detections survived filtering.
    pub no_detections: bool,
}

impl Reading {
    pub fn text(&self) -> &str {
        &self.text
    }

    /// Numeric value of the reading, `None` when empty.
    pub fn value(&self) -> Option<f64> {
        self.text.parse().ok()
    }

    /// Digits with the decimal point removed.
    pub fn digits(&self) -> String {
        self.text.chars().filter(char::is_ascii_digit).collect()
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `[0-9]+(\.[0-9]+)?`
pub fn is_reading_text(s: &str) -> bool {
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    match s.split_once('.') {
        Some((int, frac)) => digits(int) && digits(frac),
        None => digits(s),
    }
}

/// Concatenates digit labels in the given order and inserts a decimal point
/// before the last `decimal_places` digits.
///
/// With no more tokens than decimal places the point leads (`.61`), so
/// the text is always one character longer than the token count when the
/// register has decimals. Non-digit labels are skipped.
pub fn assemble_reading(ordered: &[Detection], config: &MeterConfig) -> Reading {
    let digits: String = ordered.iter().filter_map(|d| d.label.digit()).map(|d| char::from(b'0' + d)).collect();
    if digits.is_empty() {
        return Reading { text: String::new(), position_mismatch: true, no_detections: true };
    }
    let decimals = config.decimal_places() as usize;
    let text = if decimals > 0 {
        let (int, frac) = digits.split_at(digits.len().saturating_sub(decimals));
        format!("{int}.{frac}")
    } else {
        digits.clone()
    };
    Reading { position_mismatch: digits.len() != config.digit_positions() as usize, no_detections: false, text }
}

/// How filtered and expected readings are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompareMode {
    /// Exact string equality after trimming surrounding whitespace.
    #[default]
    Exact,
    /// Equality of the digit sequences, ignoring decimal points.
    DigitsOnly,
}

pub fn is_correct(filtered: &str, expected: &str, mode: CompareMode) -> bool {
    let (f, e) = (filtered.trim(), expected.trim());
    match mode {
        CompareMode::Exact => f == e,
        CompareMode::DigitsOnly => {
            let strip = |s: &str| s.chars().filter(|c| *c != '.').collect::<String>();
            strip(f) == strip(e)
        }
    }
}
