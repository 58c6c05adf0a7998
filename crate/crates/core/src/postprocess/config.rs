use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("meter config {id:?}: decimal places ({decimals}) must be fewer than digit positions ({digits})")]
    Invalid { id: String, digits: u32, decimals: u32 },
    #[error("meter config table line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("meter config table line {line}: duplicate id {id:?}")]
    Duplicate { line: usize, id: String },
    #[error("unknown meter config {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Layout of a digit register: total positions and trailing decimal positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeterConfig {
    id: String,
    digit_positions: u32,
    decimal_places: u32,
}

impl MeterConfig {
    pub fn new(id: impl Into<String>, digit_positions: u32, decimal_places: u32) -> Result<Self, ConfigError> {
        let id = id.into();
        if digit_positions == 0 || decimal_places >= digit_positions {
            return Err(ConfigError::Invalid { id, digits: digit_positions, decimals: decimal_places });
        }
        Ok(MeterConfig { id, digit_positions, decimal_places })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn digit_positions(&self) -> u32 {
        self.digit_positions
    }

    pub fn decimal_places(&self) -> u32 {
        self.decimal_places
    }

    /// Whether `reading` has exactly this register's shape: the right digit
    /// count and a point before the last `decimal_places` digits (no point
    /// when there are none).
    pub fn accepts(&self, reading: &str) -> bool {
        let (int, frac) = match reading.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (reading, None),
        };
        let digits_ok = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        let frac_len = match frac {
            Some(f) if digits_ok(f) => f.len(),
            Some(_) => return false,
            None => 0,
        };
        digits_ok(int)
            && frac_len == self.decimal_places as usize
            && int.len() + frac_len == self.digit_positions as usize
    }
}

impl fmt::Display for MeterConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.id, self.digit_positions, self.decimal_places)
    }
}

/// Config id to register layout.
///
/// Text form is one config per line, `<id> <digit_positions> <decimal_places>`,
/// with `#` comments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigTable {
    configs: BTreeMap<String, MeterConfig>,
}

impl ConfigTable {
    /// Register formats from 5 to 8 positions with 0 to 3 decimals. `6d1`,
    /// `7d2` and `7d3` cover readings like 75691.1, 14485.68 and 5762.615.
    pub fn builtin() -> Self {
        let mut configs = BTreeMap::new();
        for (id, digits, decimals) in
            [("5d0", 5, 0), ("6d0", 6, 0), ("6d1", 6, 1), ("7d2", 7, 2), ("7d3", 7, 3), ("8d3", 8, 3)]
        {
            configs.insert(id.to_string(), MeterConfig::new(id, digits, decimals).expect("builtin configs are valid"));
        }
        ConfigTable { configs }
    }

    pub fn from_configs(configs: impl IntoIterator<Item = MeterConfig>) -> Self {
        ConfigTable { configs: configs.into_iter().map(|c| (c.id.clone(), c)).collect() }
    }

    pub fn get(&self, id: &str) -> Result<&MeterConfig, ConfigError> {
        self.configs.get(id).ok_or_else(|| ConfigError::Unknown(id.to_string()))
    }

    /// Configs in id order.
    pub fn iter(&self) -> impl Iterator<Item = &MeterConfig> {
        self.configs.values()
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut configs = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: &str| ConfigError::Malformed { line: i + 1, reason: reason.into() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [id, digits, decimals] = fields[..] else {
                return Err(malformed("expected `<id> <digit_positions> <decimal_places>`"));
            };
            let digits = digits.parse().map_err(|_| malformed("digit positions must be an integer"))?;
            let decimals = decimals.parse().map_err(|_| malformed("decimal places must be an integer"))?;
            let config = MeterConfig::new(id, digits, decimals)?;
            if configs.insert(id.to_string(), config).is_some() {
                return Err(ConfigError::Duplicate { line: i + 1, id: id.to_string() });
            }
        }
        Ok(ConfigTable { configs })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# id digit_positions decimal_places\n");
        for c in self.configs.values() {
            out.push_str(&format!("{c}\n"));
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&fs::read_to_string(path)?)
    }
}
