//! Synthetic digit-register renderer with exact ground truth.

use std::fs;
use std::io;
use std::path::Path;

use super::glyphs::{lit_dots, DOT_SIZE, GLYPH_COLS, GLYPH_ROWS};
use crate::detector::{BoundingBox, Detection, Label};
use crate::imaging::ImageBuffer;
use crate::postprocess::MeterConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderStyle {
    /// Pixels per glyph dot.
    pub dot: u32,
    /// Padding between glyph and cell edge.
    pub cell_pad: u32,
    /// Band-colored gap between adjacent cells.
    pub cell_gap: u32,
    /// Background margin around the register band.
    pub margin: u32,
    pub background: [u8; 3],
    pub band: [u8; 3],
    /// Cell shade behind decimal digits.
    pub decimal_cell: [u8; 3],
    pub ink: [u8; 3],
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            dot: DOT_SIZE,
            cell_pad: 8,
            cell_gap: 4,
            margin: 16,
            background: [190, 190, 190],
            band: [40, 40, 40],
            decimal_cell: [96, 28, 28],
            ink: [235, 235, 235],
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("reading {reading:?} does not fit meter config {config}")]
    ReadingMismatch { reading: String, config: String },
}

/// True digit boxes of a rendered register, left to right.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub detections: Vec<Detection>,
}

impl GroundTruth {
    pub fn labels(&self) -> Vec<u8> {
        self.detections.iter().filter_map(|d| d.label.digit()).collect()
    }

    /// Sidecar text: one `label x0 y0 x1 y1` line per box.
    pub fn to_text(&self) -> String {
        self.detections
            .iter()
            .map(|d| format!("{} {} {} {} {}\n", d.label, d.bbox.x0, d.bbox.y0, d.bbox.x1, d.bbox.y1))
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut detections = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let [label, x0, y0, x1, y1] = f[..] else {
                return Err(format!("line {}: expected `label x0 y0 x1 y1`", i + 1));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| format!("line {}: not a number {s:?}", i + 1));
            let det = Detection::new(
                label.parse::<Label>().map_err(|e| format!("line {}: {e}", i + 1))?,
                1.0,
                BoundingBox::new(num(x0)?, num(y0)?, num(x1)?, num(y1)?),
            )
            .map_err(|e| format!("line {}: {e}", i + 1))?;
            detections.push(det);
        }
        Ok(GroundTruth { detections })
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_text())
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Self::parse(&fs::read_to_string(path)?).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

/// Renders `reading` as a register of equal-width digit cells on a dark
/// band. Decimal digits sit in cells of a different shade; glyph shapes are
/// identical. The ground truth holds one box per glyph.
pub fn render_synthetic_meter(
    reading: &str,
    config: &MeterConfig,
    style: &RenderStyle,
) -> Result<(ImageBuffer, GroundTruth), RenderError> {
    if !config.accepts(reading) {
        return Err(RenderError::ReadingMismatch { reading: reading.to_string(), config: config.to_string() });
    }
    let digits: Vec<u8> = reading.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
    let n = digits.len() as u32;
    let first_decimal = n - config.decimal_places();

    let glyph_w = GLYPH_COLS * style.dot;
    let glyph_h = GLYPH_ROWS * style.dot;
    let cell_w = glyph_w + 2 * style.cell_pad;
    let cell_h = glyph_h + 2 * style.cell_pad;
    let band_w = n * cell_w + (n - 1) * style.cell_gap;
    let width = band_w + 2 * style.margin;
    let height = cell_h + 2 * style.margin;

    let mut img = ImageBuffer::filled(width, height, style.background).expect("non-empty register");
    img.fill_rect(style.margin, style.margin, style.margin + band_w, style.margin + cell_h, style.band);

    let mut truth = GroundTruth::default();
    for (i, &digit) in digits.iter().enumerate() {
        let i = i as u32;
        let cell_x = style.margin + i * (cell_w + style.cell_gap);
        if i >= first_decimal {
            img.fill_rect(cell_x, style.margin, cell_x + cell_w, style.margin + cell_h, style.decimal_cell);
        }
        let gx = cell_x + style.cell_pad;
        let gy = style.margin + style.cell_pad;
        for (col, row) in lit_dots(digit) {
            let x = gx + col * style.dot;
            let y = gy + row * style.dot;
            img.fill_rect(x, y, x + style.dot, y + style.dot, style.ink);
        }
        truth.detections.push(Detection::digit(
            digit,
            1.0,
            BoundingBox::new(gx as f64, gy as f64, (gx + glyph_w) as f64, (gy + glyph_h) as f64),
        ));
    }
    Ok((img, truth))
}
