//! Normalized cross-correlation matcher over the built-in digit atlas.
//!
//! Each glyph template is a two-level pattern made of square dots, so the
//! correlation numerator only needs the image sum over the lit dots. With
//! summed-area tables every window statistic is a constant number of
//! lookups, which keeps a full sliding-window scan over ten templates cheap.
//!
//! For a window `W` of `n` pixels and a binary template with `m` lit pixels:
//!
//! ```text
//! ncc = (sum_lit(W) - m * mean(W)) / sqrt(var_sum(W) * (m - m^2 / n))
//! ```
//!
//! where `var_sum(W) = sum(W^2) - sum(W)^2 / n`. Flat windows score 0.

use super::{BoundingBox, DetectError, Detection, Detector, Frame, Label};
use crate::dataset::glyphs::{lit_dots, DOT_SIZE, GLYPH_COLS, GLYPH_ROWS};
use crate::imaging::ImageBuffer;

/// Peaks scoring below this are not reported.
pub const DEFAULT_SCORE_FLOOR: f64 = 0.72;

#[derive(Debug, Clone)]
pub struct TemplateDetector {
    dot: u32,
    score_floor: f64,
    templates: Vec<(u8, Vec<(u32, u32)>)>,
}

impl Default for TemplateDetector {
    fn default() -> Self {
        Self::new()
    }
}

/// Summed-area table with a zero row and column prepended.
struct Integral {
    stride: usize,
    sums: Vec<f64>,
}

impl Integral {
    fn new(values: impl Fn(usize) -> f64, width: usize, height: usize) -> Self {
        let stride = width + 1;
        let mut sums = vec![0.0; stride * (height + 1)];
        for y in 0..height {
            let mut row = 0.0;
            for x in 0..width {
                row += values(y * width + x);
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Integral { stride, sums }
    }

    fn rect(&self, x: usize, y: usize, w: usize, h: usize) -> f64 {
        let s = self.stride;
        self.sums[(y + h) * s + x + w] - self.sums[y * s + x + w] - self.sums[(y + h) * s + x] + self.sums[y * s + x]
    }
}

impl TemplateDetector {
    pub fn new() -> Self {
        TemplateDetector {
            dot: DOT_SIZE,
            score_floor: DEFAULT_SCORE_FLOOR,
            templates: (0..10).map(|d| (d, lit_dots(d).collect())).collect(),
        }
    }

    pub fn with_score_floor(mut self, floor: f64) -> Self {
        self.score_floor = floor;
        self
    }

    /// Template box size in pixels.
    pub fn template_size(&self) -> (u32, u32) {
        (GLYPH_COLS * self.dot, GLYPH_ROWS * self.dot)
    }

    /// Correlation score of every template at every valid window origin.
    /// Returned maps are indexed `[digit][y * cols + x]`.
    fn score_maps(&self, image: &ImageBuffer) -> Option<(usize, usize, Vec<Vec<f64>>)> {
        let (tw, th) = self.template_size();
        let (w, h) = (image.width() as usize, image.height() as usize);
        let (tw, th) = (tw as usize, th as usize);
        if w < tw || h < th {
            return None;
        }
        let gray = image.to_gray();
        let sum = Integral::new(|i| gray[i] as f64, w, h);
        let sq = Integral::new(|i| (gray[i] as f64).powi(2), w, h);
        let (cols, rows) = (w - tw + 1, h - th + 1);
        let n = (tw * th) as f64;
        let dot = self.dot as usize;

        let mut window_stats = Vec::with_capacity(cols * rows);
        for y in 0..rows {
            for x in 0..cols {
                let s = sum.rect(x, y, tw, th);
                let var = sq.rect(x, y, tw, th) - s * s / n;
                window_stats.push((s / n, var));
            }
        }

        let maps = self
            .templates
            .iter()
            .map(|(_, dots)| {
                let m = (dots.len() * dot * dot) as f64;
                let t_var = m - m * m / n;
                let mut map = vec![0.0; cols * rows];
                for y in 0..rows {
                    for x in 0..cols {
                        let (mean, var) = window_stats[y * cols + x];
                        if var <= 1e-9 * n {
                            continue;
                        }
                        let lit: f64 = dots
                            .iter()
                            .map(|&(c, r)| sum.rect(x + c as usize * dot, y + r as usize * dot, dot, dot))
                            .sum();
                        map[y * cols + x] = (lit - m * mean) / (var * t_var).sqrt();
                    }
                }
                map
            })
            .collect();
        Some((cols, rows, maps))
    }

    /// Best correlation score of `digit` anywhere in the image.
    pub fn best_score(&self, image: &ImageBuffer, digit: u8) -> f64 {
        self.score_maps(image)
            .map(|(_, _, maps)| maps[digit as usize].iter().copied().fold(f64::MIN, f64::max))
            .unwrap_or(0.0)
    }

    pub fn detect_image(&self, image: &ImageBuffer) -> Vec<Detection> {
        let Some((cols, rows, maps)) = self.score_maps(image) else {
            return Vec::new();
        };
        let (tw, th) = self.template_size();
        let mut out = Vec::new();
        for ((digit, _), map) in self.templates.iter().zip(&maps) {
            for y in 0..rows {
                for x in 0..cols {
                    let score = map[y * cols + x];
                    if score < self.score_floor || !is_peak(map, cols, rows, x, y) {
                        continue;
                    }
                    let (x0, y0) = (x as f64, y as f64);
                    out.push(Detection {
                        label: Label::Digit(*digit),
                        confidence: score.clamp(0.0, 1.0),
                        bbox: BoundingBox::new(x0, y0, x0 + tw as f64, y0 + th as f64),
                    });
                }
            }
        }
        out
    }
}

/// No 8-neighbor scores strictly higher.
fn is_peak(map: &[f64], cols: usize, rows: usize, x: usize, y: usize) -> bool {
    let v = map[y * cols + x];
    for ny in y.saturating_sub(1)..=(y + 1).min(rows - 1) {
        for nx in x.saturating_sub(1)..=(x + 1).min(cols - 1) {
            if map[ny * cols + nx] > v {
                return false;
            }
        }
    }
    true
}

impl Detector for TemplateDetector {
    fn name(&self) -> &str {
        "template"
    }

    fn detect(&self, frame: &Frame<'_>) -> Result<Vec<Detection>, DetectError> {
        Ok(self.detect_image(frame.image))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct NCC over the window, no summed-area tables.
    fn ncc_oracle(image: &ImageBuffer, digit: u8, x: usize, y: usize) -> f64 {
        let gray = image.to_gray();
        let w = image.width() as usize;
        let (tw, th) = ((GLYPH_COLS * DOT_SIZE) as usize, (GLYPH_ROWS * DOT_SIZE) as usize);
        let mut img_vals = Vec::new();
        let mut tpl_vals = Vec::new();
        for dy in 0..th {
            for dx in 0..tw {
                img_vals.push(gray[(y + dy) * w + x + dx] as f64);
                let lit = crate::dataset::glyphs::is_lit(
                    digit,
                    (dx / DOT_SIZE as usize) as u32,
                    (dy / DOT_SIZE as usize) as u32,
                );
                tpl_vals.push(if lit { 1.0 } else { 0.0 });
            }
        }
        let n = img_vals.len() as f64;
        let mi = img_vals.iter().sum::<f64>() / n;
        let mt = tpl_vals.iter().sum::<f64>() / n;
        let num: f64 = img_vals.iter().zip(&tpl_vals).map(|(a, b)| (a - mi) * (b - mt)).sum();
        let vi: f64 = img_vals.iter().map(|a| (a - mi).powi(2)).sum();
        let vt: f64 = tpl_vals.iter().map(|b| (b - mt).powi(2)).sum();
        num / (vi * vt).sqrt()
    }

    fn textured(width: u32, height: u32) -> ImageBuffer {
        let data = (0..width * height * 3).map(|i| ((i / 3) * 7919 % 253) as u8).collect();
        ImageBuffer::new(width, height, data).unwrap()
    }

    #[test]
    fn integral_scores_match_direct_ncc() {
        let img = textured(50, 64);
        let det = TemplateDetector::new();
        let (cols, _, maps) = det.score_maps(&img).unwrap();
        for digit in [0u8, 1, 7] {
            for (x, y) in [(0, 0), (3, 5), (10, 8)] {
                let fast = maps[digit as usize][y * cols + x];
                assert!((fast - ncc_oracle(&img, digit, x, y)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn blank_and_small_images_yield_nothing() {
        let det = TemplateDetector::new();
        assert!(det.detect_image(&ImageBuffer::filled(200, 100, [90; 3]).unwrap()).is_empty());
        assert!(det.detect_image(&ImageBuffer::filled(10, 10, [0; 3]).unwrap()).is_empty());
    }
}
