//! Brute-force reference for detection deduplication.
//!
//! Enumerates every keep/drop subset of the candidates (digit labels above
//! the floor) and returns the subsets that are
//!
//! * independent: no two kept detections overlap at or above the IoU
//!   threshold, and
//! * dominated: every dropped candidate overlaps some kept detection of
//!   strictly higher priority.
//!
//! Priority is higher confidence, then smaller x0, then smaller y0 (then
//! x1, y1, label). Exactly one subset satisfies both conditions for any
//! input; callers assert that.

#![allow(dead_code)]

use std::cmp::Ordering;

use meterbench::Detection;

fn priority(a: &Detection, b: &Detection) -> Ordering {
    if a.confidence != b.confidence {
        return if a.confidence > b.confidence { Ordering::Less } else { Ordering::Greater };
    }
    for (x, y) in [(a.bbox.x0, b.bbox.x0), (a.bbox.y0, b.bbox.y0), (a.bbox.x1, b.bbox.x1), (a.bbox.y1, b.bbox.y1)] {
        if x != y {
            return if x < y { Ordering::Less } else { Ordering::Greater };
        }
    }
    a.label.cmp(&b.label)
}

fn overlap(a: &Detection, b: &Detection) -> f64 {
    let w = a.bbox.x1.min(b.bbox.x1) - a.bbox.x0.max(b.bbox.x0);
    let h = a.bbox.y1.min(b.bbox.y1) - a.bbox.y0.max(b.bbox.y0);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let inter = w * h;
    let area = |d: &Detection| (d.bbox.x1 - d.bbox.x0) * (d.bbox.y1 - d.bbox.y0);
    inter / (area(a) + area(b) - inter)
}

/// All valid kept subsets, each as detections in input order.
pub fn valid_subsets(raw: &[Detection], floor: f64, iou: f64) -> Vec<Vec<Detection>> {
    let cands: Vec<&Detection> = raw.iter().filter(|d| d.label.digit().is_some() && d.confidence > floor).collect();
    let n = cands.len();
    assert!(n <= 16, "oracle is exponential in candidate count");
    let mut adjacent = vec![0u32; n];
    let mut higher = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if overlap(cands[i], cands[j]) >= iou {
                adjacent[i] |= 1 << j;
            }
            if priority(cands[j], cands[i]) == Ordering::Less {
                higher[i] |= 1 << j;
            }
        }
    }
    let mut out = Vec::new();
    for subset in 0u32..(1 << n) {
        let independent = (0..n).all(|i| subset & (1 << i) == 0 || adjacent[i] & subset == 0);
        if !independent {
            continue;
        }
        let dominated = (0..n).all(|j| subset & (1 << j) != 0 || adjacent[j] & higher[j] & subset != 0);
        if dominated {
            out.push((0..n).filter(|i| subset & (1 << i) != 0).map(|i| cands[i].clone()).collect());
        }
    }
    out
}

/// The unique valid subset. Panics when uniqueness fails.
pub fn dedup_oracle(raw: &[Detection], floor: f64, iou: f64) -> Vec<Detection> {
    let mut subsets = valid_subsets(raw, floor, iou);
    assert_eq!(subsets.len(), 1, "expected exactly one valid keep set");
    subsets.pop().unwrap()
}

/// Order-insensitive comparison key for a detection set.
pub fn set_key(dets: &[Detection]) -> Vec<String> {
    let mut keys: Vec<String> = dets
        .iter()
        .map(|d| {
            format!("{}|{:?}|{:?}|{:?}|{:?}|{:?}", d.label, d.confidence, d.bbox.x0, d.bbox.y0, d.bbox.x1, d.bbox.y1)
        })
        .collect();
    keys.sort();
    keys
}
