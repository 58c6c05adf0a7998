use super::{quantize, ImageBuffer, ImageError};
use crate::rng::SplitMix64;

/// Normalized box filter with clamp-to-edge borders.
///
/// Each output sample is the mean of the `kernel x kernel` neighborhood,
/// rounded half away from zero. Sums are accumulated exactly in integers, so
/// only the final quantization rounds.
pub fn box_blur(img: &ImageBuffer, kernel: u32) -> Result<ImageBuffer, ImageError> {
    if kernel < 1 {
        return Err(ImageError::invalid("blur", "kernel must be at least 1"));
    }
    if kernel.is_multiple_of(2) {
        return Err(ImageError::invalid(
            "blur",
            format!("kernel {kernel} is even; a centered box filter needs an odd size"),
        ));
    }
    let limit = 2 * img.width().max(img.height()) + 1;
    if kernel > limit {
        return Err(ImageError::invalid(
            "blur",
            format!("kernel {kernel} exceeds {limit} for a {}x{} image", img.width(), img.height()),
        ));
    }
    if kernel == 1 {
        return Ok(img.clone());
    }

    let w = img.width() as usize;
    let h = img.height() as usize;
    let r = (kernel / 2) as isize;
    let src = img.data();
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    // Horizontal window sums per channel.
    let mut horiz = vec![0u32; w * h * 3];
    for y in 0..h {
        let row = &src[y * w * 3..(y + 1) * w * 3];
        let out = &mut horiz[y * w * 3..(y + 1) * w * 3];
        for c in 0..3 {
            let at = |x: isize| row[clamp(x, w) * 3 + c] as u32;
            let mut sum: u32 = (-r..=r).map(at).sum();
            for x in 0..w as isize {
                out[x as usize * 3 + c] = sum;
                sum = sum + at(x + r + 1) - at(x - r);
            }
        }
    }

    let area = kernel * kernel;
    let mut data = vec![0u8; w * h * 3];
    for x in 0..w {
        for c in 0..3 {
            let at = |y: isize| horiz[(clamp(y, h) * w + x) * 3 + c];
            let mut sum: u32 = (-r..=r).map(at).sum();
            for y in 0..h as isize {
                data[(y as usize * w + x) * 3 + c] = ((2 * sum + area) / (2 * area)) as u8;
                sum = sum + at(y + r + 1) - at(y - r);
            }
        }
    }
    ImageBuffer::new(img.width(), img.height(), data)
}

/// The 256-entry table `T[v] = round(255 * (v / 255)^gamma)`.
pub fn gamma_table(gamma: f64) -> Result<[u8; 256], ImageError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(ImageError::invalid("gamma", format!("gamma must be a positive finite number, got {gamma}")));
    }
    let mut table = [0u8; 256];
    for (v, slot) in table.iter_mut().enumerate() {
        *slot = quantize(255.0 * (v as f64 / 255.0).powf(gamma));
    }
    Ok(table)
}

/// Lookup-table gamma correction. `gamma < 1` brightens, `gamma > 1` darkens.
pub fn gamma_correct(img: &ImageBuffer, gamma: f64) -> Result<ImageBuffer, ImageError> {
    let table = gamma_table(gamma)?;
    let data = img.data().iter().map(|&v| table[v as usize]).collect();
    ImageBuffer::new(img.width(), img.height(), data)
}

/// Salt-and-pepper impulse noise.
///
/// Exactly `round(amount * width * height)` distinct pixels are chosen by a
/// partial Fisher-Yates shuffle of the pixel indices driven by
/// [`SplitMix64`]. Once all positions are chosen, one further draw per chosen
/// pixel (in selection order) picks white (top bit set) or black.
pub fn salt_pepper(img: &ImageBuffer, amount: f64, seed: u64) -> Result<ImageBuffer, ImageError> {
    if !(0.0..=1.0).contains(&amount) {
        return Err(ImageError::invalid("salt-and-pepper", format!("amount must lie in [0, 1], got {amount}")));
    }
    let total = img.pixel_count();
    let count = ((amount * total as f64).round() as usize).min(total);
    let mut out = img.clone();
    if count == 0 {
        return Ok(out);
    }

    let mut rng = SplitMix64::new(seed);
    let mut indices: Vec<u32> = (0..total as u32).collect();
    for i in 0..count {
        let j = i + rng.next_below((total - i) as u64) as usize;
        indices.swap(i, j);
    }
    let width = img.width();
    for &idx in &indices[..count] {
        let rgb = if rng.next_bool() { [255; 3] } else { [0; 3] };
        out.set_pixel(idx % width, idx / width, rgb);
    }
    Ok(out)
}

/// Bilinear downscale. Output size per axis is `max(1, round(factor * dim))`;
/// samples are taken at source pixel centers.
pub fn scale(img: &ImageBuffer, factor: f64) -> Result<ImageBuffer, ImageError> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(ImageError::invalid("scale", format!("factor must lie in (0, 1], got {factor}")));
    }
    let (sw, sh) = (img.width(), img.height());
    let dw = ((factor * sw as f64).round() as u32).max(1);
    let dh = ((factor * sh as f64).round() as u32).max(1);
    if (dw, dh) == (sw, sh) {
        return Ok(img.clone());
    }

    let taps = |dst: u32, src_len: u32, dst_len: u32| -> Vec<(usize, usize, f64)> {
        (0..dst)
            .map(|d| {
                let s = ((d as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5).clamp(0.0, (src_len - 1) as f64);
                let lo = s.floor() as usize;
                let hi = (lo + 1).min(src_len as usize - 1);
                (lo, hi, s - lo as f64)
            })
            .collect()
    };
    let xs = taps(dw, sw, dw);
    let ys = taps(dh, sh, dh);

    let src = img.data();
    let stride = sw as usize * 3;
    let mut data = Vec::with_capacity(dw as usize * dh as usize * 3);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            for c in 0..3 {
                let p = |x: usize, y: usize| src[y * stride + x * 3 + c] as f64;
                let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
                let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
                data.push(quantize(top * (1.0 - fy) + bottom * fy));
            }
        }
    }
    ImageBuffer::new(dw, dh, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray_row(values: &[u8]) -> ImageBuffer {
        ImageBuffer::from_gray(values.len() as u32, 1, values).unwrap()
    }

    fn channel0(img: &ImageBuffer) -> Vec<u8> {
        img.data().chunks_exact(3).map(|p| p[0]).collect()
    }

    fn varied(width: u32, height: u32) -> ImageBuffer {
        let data = (0..width * height * 3).map(|i| (i * 37 % 251) as u8).collect();
        ImageBuffer::new(width, height, data).unwrap()
    }

    /// Direct neighborhood mean with explicit clamping, independent of the
    /// running-sum implementation.
    fn blur_oracle(img: &ImageBuffer, kernel: u32) -> ImageBuffer {
        let (w, h) = (img.width() as i64, img.height() as i64);
        let r = kernel as i64 / 2;
        let mut out = img.clone();
        for y in 0..h {
            for x in 0..w {
                let mut acc = [0f64; 3];
                for dy in -r..=r {
                    for dx in -r..=r {
                        let p = img.pixel((x + dx).clamp(0, w - 1) as u32, (y + dy).clamp(0, h - 1) as u32);
                        for c in 0..3 {
                            acc[c] += p[c] as f64;
                        }
                    }
                }
                let n = (kernel * kernel) as f64;
                out.set_pixel(x as u32, y as u32, acc.map(|s| (s / n).round() as u8));
            }
        }
        out
    }

    #[test]
    fn blur_hand_example() {
        let out = box_blur(&gray_row(&[10, 20, 30]), 3).unwrap();
        assert_eq!(channel0(&out), vec![13, 20, 27]);
    }

    #[test]
    fn blur_matches_direct_mean() {
        let img = varied(13, 9);
        for k in [3, 5, 7, 11, 19, 27] {
            assert_eq!(box_blur(&img, k).unwrap(), blur_oracle(&img, k), "kernel {k}");
        }
    }

    #[test]
    fn blur_identity_and_constant() {
        let img = varied(7, 5);
        assert_eq!(box_blur(&img, 1).unwrap(), img);
        let flat = ImageBuffer::filled(9, 4, [17, 200, 3]).unwrap();
        assert_eq!(box_blur(&flat, 9).unwrap(), flat);
    }

    #[test]
    fn blur_rejects_bad_kernels() {
        let img = varied(4, 3);
        assert!(box_blur(&img, 0).is_err());
        assert!(box_blur(&img, 4).is_err());
        assert!(box_blur(&img, 9).is_ok());
        assert!(box_blur(&img, 11).is_err());
    }

    #[test]
    fn gamma_examples() {
        let table = gamma_table(2.0).unwrap();
        assert_eq!(table[128], 64);
        for g in [0.25, 0.5, 1.0, 1.75, 3.0] {
            let t = gamma_table(g).unwrap();
            assert_eq!((t[0], t[255]), (0, 255));
            assert!(t.windows(2).all(|w| w[0] <= w[1]));
        }
        let img = varied(5, 5);
        assert_eq!(gamma_correct(&img, 1.0).unwrap(), img);
        assert!(gamma_correct(&img, 0.0).is_err());
        assert!(gamma_correct(&img, -1.0).is_err());
        assert!(gamma_correct(&img, f64::NAN).is_err());
    }

    #[test]
    fn gamma_direction() {
        let t = gamma_table(0.5).unwrap();
        assert!(t[100] > 100);
        let t = gamma_table(1.5).unwrap();
        assert!(t[100] < 100);
    }

    #[test]
    fn salt_pepper_counts() {
        let img = ImageBuffer::filled(100, 100, [128, 128, 128]).unwrap();
        let out = salt_pepper(&img, 0.12, 9).unwrap();
        let changed = img.data().chunks_exact(3).zip(out.data().chunks_exact(3)).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 1200);

        assert_eq!(salt_pepper(&img, 0.0, 1).unwrap(), img);
        let full = salt_pepper(&img, 1.0, 1).unwrap();
        assert!(full.data().chunks_exact(3).all(|p| p == [0; 3] || p == [255; 3]));
        assert!(salt_pepper(&img, 1.5, 1).is_err());
        assert!(salt_pepper(&img, -0.1, 1).is_err());
    }

    #[test]
    fn salt_pepper_seeding() {
        let img = varied(10, 10);
        assert_eq!(salt_pepper(&img, 0.3, 5).unwrap(), salt_pepper(&img, 0.3, 5).unwrap());
        let differing = (0..10u64)
            .filter(|&s| salt_pepper(&img, 0.3, s).unwrap() != salt_pepper(&img, 0.3, s + 100).unwrap())
            .count();
        assert!(differing >= 1);
    }

    #[test]
    fn scale_examples() {
        let out = scale(&gray_row(&[0, 255]), 0.5).unwrap();
        assert_eq!((out.width(), out.height()), (1, 1));
        assert_eq!(out.pixel(0, 0), [128; 3]);

        let img = varied(100, 100);
        let small = scale(&img, 0.1).unwrap();
        assert_eq!((small.width(), small.height()), (10, 10));
        assert_eq!(scale(&img, 1.0).unwrap(), img);

        let tiny = scale(&varied(3, 2), 0.1).unwrap();
        assert_eq!((tiny.width(), tiny.height()), (1, 1));
        assert!(scale(&img, 0.0).is_err());
        assert!(scale(&img, 1.01).is_err());
    }
}
