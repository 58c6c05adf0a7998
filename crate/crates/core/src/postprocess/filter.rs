use std::cmp::Ordering;

use crate::detector::Detection;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    /// Detections must score strictly above this to survive.
    pub confidence_floor: f64,
    /// Two detections with IoU at or above this are duplicates.
    pub duplicate_iou: f64,
}

impl FilterParams {
    pub fn new(confidence_floor: f64, duplicate_iou: f64) -> Result<Self, String> {
        if !(0.0..1.0).contains(&confidence_floor) {
            return Err(format!("confidence floor must lie in [0, 1), got {confidence_floor}"));
        }
        if !(duplicate_iou > 0.0 && duplicate_iou <= 1.0) {
            return Err(format!("duplicate IoU must lie in (0, 1], got {duplicate_iou}"));
        }
        Ok(FilterParams { confidence_floor, duplicate_iou })
    }
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams { confidence_floor: 0.10, duplicate_iou: 0.50 }
    }
}

/// Keep priority: higher confidence first, ties to smaller `x0`, then
/// smaller `y0`. Remaining ties fall back to `x1`, `y1` and label so the
/// order is total.
pub fn priority_order(a: &Detection, b: &Detection) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then(a.bbox.x0.total_cmp(&b.bbox.x0))
        .then(a.bbox.y0.total_cmp(&b.bbox.y0))
        .then(a.bbox.x1.total_cmp(&b.bbox.x1))
        .then(a.bbox.y1.total_cmp(&b.bbox.y1))
        .then_with(|| a.label.cmp(&b.label))
}

/// Left to right by box center, then top to bottom, then higher confidence.
fn reading_order(a: &Detection, b: &Detection) -> Ordering {
    a.bbox
        .center_x()
        .total_cmp(&b.bbox.center_x())
        .then(a.bbox.center_y().total_cmp(&b.bbox.center_y()))
        .then_with(|| priority_order(a, b))
}

/// Junk removal, duplicate suppression and left-to-right ordering.
///
/// Candidates are digit detections with confidence above the floor. They
/// are visited in [`priority_order`]; each is kept iff its IoU with every
/// already-kept detection is below `duplicate_iou`. Survivors are returned
/// sorted by ascending box x-center.
pub fn filter_detections(raw: &[Detection], params: &FilterParams) -> Vec<Detection> {
    let mut candidates: Vec<&Detection> =
        raw.iter().filter(|d| d.label.digit().is_some() && d.confidence > params.confidence_floor).collect();
    candidates.sort_by(|a, b| priority_order(a, b));

    let mut kept: Vec<Detection> = Vec::with_capacity(candidates.len());
    for cand in candidates {
        if kept.iter().all(|k| k.bbox.iou(&cand.bbox) < params.duplicate_iou) {
            kept.push(cand.clone());
        }
    }
    kept.sort_by(reading_order);
    kept
}
