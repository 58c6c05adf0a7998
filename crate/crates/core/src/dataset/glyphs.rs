//! Built-in 5x7 dot-matrix digit atlas shared by the renderer and the
//! template detector.

pub const GLYPH_COLS: u32 = 5;
pub const GLYPH_ROWS: u32 = 7;
/// Pixels per dot in rendered output.
pub const DOT_SIZE: u32 = 8;

/// Rows top to bottom; bit 4 is the leftmost column.
const DIGITS: [[u8; 7]; 10] = [
    [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110],
    [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
    [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111],
    [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110],
    [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010],
    [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110],
    [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110],
    [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000],
    [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110],
    [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100],
];

/// Whether the dot at `(col, row)` of `digit` is lit.
pub fn is_lit(digit: u8, col: u32, row: u32) -> bool {
    DIGITS[digit as usize][row as usize] >> (GLYPH_COLS - 1 - col) & 1 == 1
}

/// Lit dots of `digit` as `(col, row)` pairs.
pub fn lit_dots(digit: u8) -> impl Iterator<Item = (u32, u32)> {
    (0..GLYPH_ROWS)
        .flat_map(move |row| (0..GLYPH_COLS).filter(move |&col| is_lit(digit, col, row)).map(move |col| (col, row)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn glyphs_are_distinct_and_nonempty() {
        let shapes: HashSet<Vec<(u32, u32)>> = (0..10).map(|d| lit_dots(d).collect()).collect();
        assert_eq!(shapes.len(), 10);
        assert!(shapes.iter().all(|s| !s.is_empty()));
    }

    #[test]
    fn one_is_a_centered_stem() {
        assert!(is_lit(1, 2, 0));
        assert!(!is_lit(1, 0, 3));
        assert_eq!(lit_dots(1).count(), 10);
    }
}
