//! Axis-aligned boxes and the pairwise decompositions every metric is
//! built from.
//!
//! Image coordinates: x grows rightward, y grows downward. The bottom edge
//! of a box is therefore `y + h`; for a floating object it approximates the
//! waterline, which is why several metrics key on it.

use crate::error::{Error, Result};

/// Axis-aligned bounding box with strictly positive extents.
///
/// `x`/`y` locate the top-left corner and may be negative (detections can
/// extend past the image edge); `w`/`h` are rejected at construction unless
/// strictly positive, so downstream arithmetic never divides by a zero
/// width, height, or area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        let reject = |reason| Error::InvalidBox { x, y, w, h, reason };
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(reject("all fields must be finite"));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(reject("width and height must be strictly positive"));
        }
        Ok(Self { x, y, w, h })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn width(&self) -> f64 {
        self.w
    }

    pub fn height(&self) -> f64 {
        self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    /// Lower edge in image coordinates (larger y is lower in the image).
    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Areas of the three regions a ground-truth/detection pair induces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapDecomposition {
    /// Area covered by the ground truth but not the detection.
    pub gt_only: f64,
    /// Area covered by both boxes.
    pub shared: f64,
    /// Area covered by the detection but not the ground truth.
    pub do_only: f64,
}

/// Widths of the three spans the horizontal projections induce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalDecomposition {
    /// Span covered by the ground truth alone.
    pub gt_only: f64,
    /// Span covered by both projections.
    pub shared: f64,
    /// Span covered by the detection alone.
    pub do_only: f64,
}

fn interval_overlap(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> f64 {
    (a_hi.min(b_hi) - a_lo.max(b_lo)).max(0.0)
}

/// Splits the union of `gt` and `det` into gt-only, shared, and det-only
/// areas. The three parts always sum to the union area.
///
/// Each side's own area is measured from the same rounded edge coordinates
/// as the shared region, and the leftover parts are clamped at zero, so
/// identical boxes decompose to exactly (0, area, 0) and no component is
/// ever a small negative artifact.
pub fn decompose_areas(gt: &BBox, det: &BBox) -> OverlapDecomposition {
    let x_overlap = interval_overlap(gt.x(), gt.right(), det.x(), det.right());
    let y_overlap = interval_overlap(gt.y(), gt.bottom(), det.y(), det.bottom());
    let shared = x_overlap * y_overlap;
    let gt_area = (gt.right() - gt.x()) * (gt.bottom() - gt.y());
    let det_area = (det.right() - det.x()) * (det.bottom() - det.y());
    OverlapDecomposition {
        gt_only: (gt_area - shared).max(0.0),
        shared,
        do_only: (det_area - shared).max(0.0),
    }
}

/// Same split for the horizontal projections of the two boxes, ignoring all
/// vertical extent.
pub fn decompose_horizontal(gt: &BBox, det: &BBox) -> HorizontalDecomposition {
    let shared = interval_overlap(gt.x(), gt.right(), det.x(), det.right());
    HorizontalDecomposition {
        gt_only: ((gt.right() - gt.x()) - shared).max(0.0),
        shared,
        do_only: ((det.right() - det.x()) - shared).max(0.0),
    }
}

/// Absolute distance between the two bottom edges, in pixels.
pub fn bottom_edge_gap(gt: &BBox, det: &BBox) -> f64 {
    (gt.bottom() - det.bottom()).abs()
}
