//! Binary portable pixmap (P6, maxval 255).

use std::fs;
use std::path::Path;

use super::{ImageBuffer, ImageError};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Encodes as `P6\n<w> <h>\n255\n` followed by the raw samples.
pub fn encode_ppm(img: &ImageBuffer) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.data().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.data());
    out
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::MalformedHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::MalformedHeader(format!("{what} out of range")))
    }
}

pub fn decode_ppm(bytes: &[u8]) -> Result<ImageBuffer, ImageError> {
    if !bytes.starts_with(b"P6") {
        return Err(ImageError::MalformedHeader("missing P6 magic".into()));
    }
    let mut reader = HeaderReader { bytes, pos: 2 };
    if !bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(ImageError::MalformedHeader("missing separator after magic".into()));
    }
    let width = reader.number("width")?;
    let height = reader.number("height")?;
    let maxval = reader.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    match bytes.get(reader.pos) {
        Some(b) if b.is_ascii_whitespace() => {}
        _ => return Err(ImageError::MalformedHeader("missing separator after maxval".into())),
    }
    let payload = &bytes[reader.pos + 1..];
    let expected = width as usize * height as usize * 3;
    if payload.len() < expected {
        return Err(ImageError::Truncated { expected, actual: payload.len() });
    }
    ImageBuffer::new(width, height, payload[..expected].to_vec())
}

/// Loads a P6 pixmap. Other formats are recognized and reported as unsupported.
pub fn load_image(path: &Path) -> Result<ImageBuffer, ImageError> {
    let bytes = fs::read(path).map_err(|source| ImageError::Io { path: path.to_path_buf(), source })?;
    if bytes.starts_with(PNG_MAGIC) {
        return Err(ImageError::UnsupportedFormat(path.to_path_buf()));
    }
    decode_ppm(&bytes)
}

pub fn save_image(img: &ImageBuffer, path: &Path) -> Result<(), ImageError> {
    fs::write(path, encode_ppm(img)).map_err(|source| ImageError::Io { path: path.to_path_buf(), source })
}
