//! Perturbation grid points and their dataset tags.
//!
//! A tag such as `20BLUR` or `0.25GAMMA` names both a dataset and the exact
//! operator applied to produce it, so tags are the canonical representation
//! of a grid point. Parameters are stored as integers at tag resolution
//! (tenths for scale, hundredths for gamma and noise) which gives tags a
//! total order: ORIGINAL, then SCALE, BLUR, GAMMA and SP, each ascending.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{box_blur, gamma_correct, salt_pepper, scale, ImageBuffer, ImageError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid dataset tag {tag:?}: {reason}")]
pub struct TagParseError {
    pub tag: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetTag {
    Original,
    /// Scale factor in tenths, 1..=10.
    Scale(u32),
    /// Grid label; even labels map to the next odd kernel size.
    Blur(u32),
    /// Gamma in hundredths, 1..=999.
    Gamma(u32),
    /// Affected-pixel fraction in hundredths, 0..=100.
    SaltPepper(u32),
}

/// Operator family of a tag, as selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Scale,
    Blur,
    Gamma,
    SaltPepper,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Scale, Family::Blur, Family::Gamma, Family::SaltPepper];
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scale" => Ok(Family::Scale),
            "blur" => Ok(Family::Blur),
            "gamma" => Ok(Family::Gamma),
            "sp" | "noise" | "saltpepper" => Ok(Family::SaltPepper),
            other => Err(format!("unknown perturbation family {other:?} (expected scale, blur, gamma or sp)")),
        }
    }
}

impl DatasetTag {
    pub fn family(self) -> Option<Family> {
        match self {
            DatasetTag::Original => None,
            DatasetTag::Scale(_) => Some(Family::Scale),
            DatasetTag::Blur(_) => Some(Family::Blur),
            DatasetTag::Gamma(_) => Some(Family::Gamma),
            DatasetTag::SaltPepper(_) => Some(Family::SaltPepper),
        }
    }

    /// The operator parameter: scale factor, blur kernel size, gamma, or noise fraction.
    pub fn parameter(self) -> Option<f64> {
        match self {
            DatasetTag::Original => None,
            DatasetTag::Scale(t) => Some(t as f64 / 10.0),
            DatasetTag::Blur(_) => self.blur_kernel().map(f64::from),
            DatasetTag::Gamma(h) | DatasetTag::SaltPepper(h) => Some(h as f64 / 100.0),
        }
    }

    pub fn blur_kernel(self) -> Option<u32> {
        match self {
            DatasetTag::Blur(label) if label % 2 == 0 => Some(label + 1),
            DatasetTag::Blur(label) => Some(label),
            _ => None,
        }
    }

    /// Grid points whose values were reconstructed rather than attested by
    /// the reference study (0.25/1.25 gamma and 0.12 noise are attested).
    pub fn is_reconstructed(self) -> bool {
        match self {
            DatasetTag::Gamma(h) => !matches!(h, 25 | 125),
            DatasetTag::SaltPepper(h) => h != 12,
            _ => false,
        }
    }

    /// Applies the operator named by this tag. `seed` only affects noise.
    pub fn apply(self, img: &ImageBuffer, seed: u64) -> Result<ImageBuffer, ImageError> {
        match self {
            DatasetTag::Original => Ok(img.clone()),
            DatasetTag::Scale(t) => scale(img, t as f64 / 10.0),
            DatasetTag::Blur(_) => box_blur(img, self.blur_kernel().unwrap_or(1)),
            DatasetTag::Gamma(h) => gamma_correct(img, h as f64 / 100.0),
            DatasetTag::SaltPepper(h) => salt_pepper(img, h as f64 / 100.0, seed),
        }
    }
}

impl fmt::Display for DatasetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DatasetTag::Original => f.write_str("ORIGINAL"),
            DatasetTag::Scale(t) => write!(f, "{}.{}SCALE", t / 10, t % 10),
            DatasetTag::Blur(k) => write!(f, "{k}BLUR"),
            DatasetTag::Gamma(h) => write!(f, "{}.{:02}GAMMA", h / 100, h % 100),
            DatasetTag::SaltPepper(h) => write!(f, "{}.{:02}SP", h / 100, h % 100),
        }
    }
}

/// Parses `d.d...` with exactly `frac` fractional digits into an integer
/// count of 10^-frac units.
fn fixed_point(s: &str, frac: usize) -> Option<u32> {
    let (int, dec) = s.split_once('.')?;
    if int.len() != 1 || dec.len() != frac {
        return None;
    }
    if !int.bytes().chain(dec.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    format!("{int}{dec}").parse().ok()
}

impl FromStr for DatasetTag {
    type Err = TagParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| TagParseError { tag: s.to_string(), reason };
        if s == "ORIGINAL" {
            return Ok(DatasetTag::Original);
        }
        if let Some(p) = s.strip_suffix("SCALE") {
            let t = fixed_point(p, 1).ok_or_else(|| err("scale must look like d.d"))?;
            return match t {
                1..=10 => Ok(DatasetTag::Scale(t)),
                _ => Err(err("scale must lie in (0, 1]")),
            };
        }
        if let Some(p) = s.strip_suffix("BLUR") {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err("blur must be a positive integer"));
            }
            return match p.parse::<u32>() {
                Ok(k) if (1..u32::MAX).contains(&k) => Ok(DatasetTag::Blur(k)),
                _ => Err(err("blur must be a positive integer")),
            };
        }
        if let Some(p) = s.strip_suffix("GAMMA") {
            let h = fixed_point(p, 2).ok_or_else(|| err("gamma must look like d.dd"))?;
            return match h {
                0 => Err(err("gamma must be positive")),
                _ => Ok(DatasetTag::Gamma(h)),
            };
        }
        if let Some(p) = s.strip_suffix("SP") {
            let h = fixed_point(p, 2).ok_or_else(|| err("noise amount must look like d.dd"))?;
            return match h {
                0..=100 => Ok(DatasetTag::SaltPepper(h)),
                _ => Err(err("noise amount must lie in [0, 1]")),
            };
        }
        Err(err("unknown tag"))
    }
}

/// The set of perturbation grid points applied to every base image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationGrids {
    points: Vec<DatasetTag>,
}

impl PerturbationGrids {
    pub fn empty() -> Self {
        PerturbationGrids { points: Vec::new() }
    }

    /// Default points for one family: scale 0.1..0.9, blur 10..90,
    /// gamma {0.25, 0.50, 0.75, 1.25, 1.50, 1.75}, noise {0.04, 0.08, 0.12}.
    pub fn default_points(family: Family) -> Vec<DatasetTag> {
        match family {
            Family::Scale => (1..=9).map(DatasetTag::Scale).collect(),
            Family::Blur => (1..=9).map(|i| DatasetTag::Blur(i * 10)).collect(),
            Family::Gamma => [25, 50, 75, 125, 150, 175].map(DatasetTag::Gamma).to_vec(),
            Family::SaltPepper => [4, 8, 12].map(DatasetTag::SaltPepper).to_vec(),
        }
    }

    pub fn for_families(families: &[Family]) -> Self {
        let mut points: Vec<DatasetTag> = families.iter().flat_map(|&f| Self::default_points(f)).collect();
        points.sort();
        points.dedup();
        PerturbationGrids { points }
    }

    pub fn from_points(points: impl IntoIterator<Item = DatasetTag>) -> Self {
        let mut points: Vec<DatasetTag> = points.into_iter().filter(|t| *t != DatasetTag::Original).collect();
        points.sort();
        points.dedup();
        PerturbationGrids { points }
    }

    pub fn points(&self) -> &[DatasetTag] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for PerturbationGrids {
    fn default() -> Self {
        Self::for_families(&Family::ALL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_spellings() {
        assert_eq!(DatasetTag::Blur(20).to_string(), "20BLUR");
        assert_eq!(DatasetTag::Gamma(25).to_string(), "0.25GAMMA");
        assert_eq!(DatasetTag::Gamma(125).to_string(), "1.25GAMMA");
        assert_eq!(DatasetTag::SaltPepper(12).to_string(), "0.12SP");
        assert_eq!(DatasetTag::Scale(5).to_string(), "0.5SCALE");
        assert_eq!(DatasetTag::Original.to_string(), "ORIGINAL");
    }

    #[test]
    fn tags_parse_back() {
        for tag in PerturbationGrids::default().points().iter().chain([&DatasetTag::Original]) {
            assert_eq!(tag.to_string().parse::<DatasetTag>().unwrap(), *tag);
        }
    }

    #[test]
    fn rejects_malformed_tags() {
        for bad in [
            "5FOO",
            "0.55SCALE",
            "1.1SCALE",
            "0.0SCALE",
            "BLUR",
            "0BLUR",
            "-3BLUR",
            "0.5GAMMA",
            "0.00GAMMA",
            "1.01SP",
            "original",
            "",
        ] {
            assert!(bad.parse::<DatasetTag>().is_err(), "{bad}");
        }
    }

    #[test]
    fn blur_labels_promote_to_odd_kernels() {
        assert_eq!(DatasetTag::Blur(10).blur_kernel(), Some(11));
        assert_eq!(DatasetTag::Blur(90).blur_kernel(), Some(91));
        assert_eq!(DatasetTag::Blur(7).blur_kernel(), Some(7));
    }

    #[test]
    fn grid_order_and_size() {
        let grids = PerturbationGrids::default();
        assert_eq!(grids.len(), 27);
        let mut sorted = grids.points().to_vec();
        sorted.sort();
        assert_eq!(sorted, grids.points());
        assert!(DatasetTag::Original < DatasetTag::Scale(1));
        assert!(DatasetTag::Scale(9) < DatasetTag::Blur(10));
        assert!(DatasetTag::Blur(90) < DatasetTag::Gamma(25));
        assert!(DatasetTag::Gamma(175) < DatasetTag::SaltPepper(4));
    }

    #[test]
    fn reconstructed_flags() {
        assert!(!DatasetTag::Gamma(25).is_reconstructed());
        assert!(!DatasetTag::Gamma(125).is_reconstructed());
        assert!(DatasetTag::Gamma(50).is_reconstructed());
        assert!(!DatasetTag::SaltPepper(12).is_reconstructed());
        assert!(DatasetTag::SaltPepper(4).is_reconstructed());
        assert!(!DatasetTag::Blur(50).is_reconstructed());
    }
}
