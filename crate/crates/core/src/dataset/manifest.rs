//! Line-delimited dataset manifests.
//!
//! One record per line, tab-separated:
//!
//! ```text
//! file<TAB>tag<TAB>expected<TAB>config<TAB>reconstructed
//! ```
//!
//! Lines starting with `#` are comments; they are kept as free-form notes,
//! except the column header line which is regenerated on save.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::imaging::DatasetTag;
use crate::postprocess::{is_reading_text, ConfigTable};

const COLUMN_HEADER: &str = "# file\ttag\texpected\tconfig\treconstructed";

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("manifest line {line}: duplicate file name {file:?}")]
    Duplicate { line: usize, file: String },
    #[error("manifest entry {file:?}: {reason}")]
    Invalid { file: String, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file_name: String,
    pub tag: DatasetTag,
    pub expected_reading: String,
    pub meter_config_id: String,
    /// Derived from reconstructed rather than attested parameters.
    pub reconstructed: bool,
}

impl ManifestEntry {
    fn check_fields(&self) -> Result<(), String> {
        let clean = |s: &str| !s.is_empty() && !s.contains(['\t', '\n', '\r']);
        if !clean(&self.file_name) || self.file_name.starts_with('#') {
            return Err(format!("invalid file name {:?}", self.file_name));
        }
        if !is_reading_text(&self.expected_reading) {
            return Err(format!("expected reading {:?} is not a reading", self.expected_reading));
        }
        if !clean(&self.meter_config_id) {
            return Err(format!("invalid config id {:?}", self.meter_config_id));
        }
        Ok(())
    }

    /// File stem of `file_name`.
    pub fn stem(&self) -> &str {
        Path::new(&self.file_name).file_stem().and_then(|s| s.to_str()).unwrap_or(&self.file_name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub notes: Vec<String>,
    entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ManifestEntry>) -> Result<Self, ManifestError> {
        let mut m = Manifest::new();
        for e in entries {
            m.push(e)?;
        }
        Ok(m)
    }

    /// Appends an entry, rejecting invalid fields and duplicate file names.
    pub fn push(&mut self, entry: ManifestEntry) -> Result<(), ManifestError> {
        entry.check_fields().map_err(|reason| ManifestError::Invalid { file: entry.file_name.clone(), reason })?;
        if self.entries.iter().any(|e| e.file_name == entry.file_name) {
            return Err(ManifestError::Duplicate { line: self.entries.len() + 1, file: entry.file_name });
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct tags in grammar order.
    pub fn tags(&self) -> Vec<DatasetTag> {
        let mut tags: Vec<DatasetTag> = self.entries.iter().map(|e| e.tag).collect();
        tags.sort();
        tags.dedup();
        tags
    }

    /// Checks every expected reading against its register config.
    pub fn validate_readings(&self, configs: &ConfigTable) -> Result<(), ManifestError> {
        for e in &self.entries {
            let invalid = |reason: String| ManifestError::Invalid { file: e.file_name.clone(), reason };
            let config = configs.get(&e.meter_config_id).map_err(|err| invalid(err.to_string()))?;
            if !config.accepts(&e.expected_reading) {
                return Err(invalid(format!(
                    "expected reading {:?} does not fit config {}",
                    e.expected_reading,
                    config.id()
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let mut manifest = Manifest::new();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            if let Some(note) = raw.strip_prefix('#') {
                if raw != COLUMN_HEADER {
                    manifest.notes.push(note.strip_prefix(' ').unwrap_or(note).to_string());
                }
                continue;
            }
            let malformed = |reason: String| ManifestError::Malformed { line: line_no, reason };
            let fields: Vec<&str> = raw.split('\t').collect();
            let [file, tag, expected, config, reconstructed] = fields[..] else {
                return Err(malformed(format!("expected 5 tab-separated fields, found {}", fields.len())));
            };
            let tag = tag.parse::<DatasetTag>().map_err(|e| malformed(e.to_string()))?;
            let reconstructed = match reconstructed {
                "true" => true,
                "false" => false,
                other => return Err(malformed(format!("reconstructed must be true or false, got {other:?}"))),
            };
            let entry = ManifestEntry {
                file_name: file.to_string(),
                tag,
                expected_reading: expected.to_string(),
                meter_config_id: config.to_string(),
                reconstructed,
            };
            entry.check_fields().map_err(malformed)?;
            if !seen.insert(entry.file_name.clone()) {
                return Err(ManifestError::Duplicate { line: line_no, file: entry.file_name });
            }
            manifest.entries.push(entry);
        }
        Ok(manifest)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for note in &self.notes {
            out.push_str("# ");
            out.push_str(note);
            out.push('\n');
        }
        out.push_str(COLUMN_HEADER);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.file_name, e.tag, e.expected_reading, e.meter_config_id, e.reconstructed
            ));
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_text())
    }
}
