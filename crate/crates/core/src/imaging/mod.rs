//! RGB rasters, portable pixmap I/O and the four perturbation operators.

mod ops;
mod perturb;
mod pnm;

pub use ops::{box_blur, gamma_correct, gamma_table, salt_pepper, scale};
pub use perturb::{DatasetTag, Family, PerturbationGrids, TagParseError};
pub use pnm::{decode_ppm, encode_ppm, load_image, save_image};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("raster length {actual} does not match {width}x{height}x3 = {expected}")]
    DataLength { width: u32, height: u32, expected: usize, actual: usize },
    #[error("invalid {operator} parameter: {reason}")]
    InvalidParameter { operator: &'static str, reason: String },
    #[error("malformed pixmap header: {0}")]
    MalformedHeader(String),
    #[error("truncated pixmap payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("unsupported pixmap maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("unsupported image format for {0}")]
    UnsupportedFormat(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ImageError {
    pub(crate) fn invalid(operator: &'static str, reason: impl Into<String>) -> Self {
        ImageError::InvalidParameter { operator, reason: reason.into() }
    }
}

/// Owned 8-bit RGB raster, row-major, three samples per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(ImageError::DataLength { width, height, expected, actual: data.len() });
        }
        Ok(ImageBuffer { width, height, data })
    }

    /// Image with every pixel set to `rgb`.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self, ImageError> {
        let n = width as usize * height as usize;
        let data = rgb.iter().copied().cycle().take(n * 3).collect();
        Self::new(width, height, data)
    }

    /// Builds an RGB image from a single-channel raster by replicating each sample.
    pub fn from_gray(width: u32, height: u32, gray: &[u8]) -> Result<Self, ImageError> {
        let data = gray.iter().flat_map(|&v| [v, v, v]).collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.offset(x, y);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = self.offset(x, y);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Fills the half-open rectangle `[x0, x1) x [y0, y1)`, clipped to the image.
    pub fn fill_rect(&mut self, x0: u32, y0: u32, x1: u32, y1: u32, rgb: [u8; 3]) {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                self.set_pixel(x, y, rgb);
            }
        }
    }

    /// Rec. 601 luma per pixel, rounded to the nearest integer.
    pub fn to_gray(&self) -> Vec<u8> {
        self.data
            .chunks_exact(3)
            .map(|p| {
                let luma = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
                ((luma + 500) / 1000) as u8
            })
            .collect()
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * 3
    }
}

/// Quantizes a non-negative sample to `u8`, rounding half away from zero.
pub(crate) fn quantize(value: f64) -> u8 {
    value.round().clamp(0.0, 255.0) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths() {
        assert!(matches!(ImageBuffer::new(2, 2, vec![0; 11]), Err(ImageError::DataLength { expected: 12, .. })));
        assert!(matches!(ImageBuffer::new(0, 2, vec![]), Err(ImageError::EmptyDimensions { .. })));
    }

    #[test]
    fn gray_replication() {
        let img = ImageBuffer::from_gray(3, 1, &[10, 20, 30]).unwrap();
        assert_eq!(img.pixel(1, 0), [20, 20, 20]);
        assert_eq!(img.to_gray(), vec![10, 20, 30]);
    }

    #[test]
    fn quantize_rounds_half_away() {
        assert_eq!(quantize(127.5), 128);
        assert_eq!(quantize(64.25), 64);
        assert_eq!(quantize(-3.0), 0);
        assert_eq!(quantize(300.0), 255);
    }
}
