//! Box-pair agreement metrics.
//!
//! Two families share the module. The Tversky family scores the area
//! decomposition (gt-only `a`, shared `b`, det-only `c`) as
//! `b / (b + alpha*a + beta*c)`; intersection-over-union, Dice, and
//! intersection-over-ground-truth are fixed-weight presets. The bottom-edge
//! proximity (BEP) family scores horizontal-span agreement (`X`) times
//! bottom-edge agreement (`Y`), which tracks how well a detection localizes
//! a floating object's waterline instead of its full silhouette.
//!
//! Every metric maps a valid box pair into `[0, 1]` and never produces NaN.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{bottom_edge_gap, decompose_areas, decompose_horizontal, BBox};

/// A scoring function for a ground-truth/detection box pair.
///
/// `Iou`, `Dice`, and `Iog` are exact Tversky presets with weights (1, 1),
/// (0.5, 0.5), and (1, 0). `X1`/`X2` and `Y1`/`Y2` are the horizontal and
/// vertical components of `Bep1`/`Bep2`, usable as standalone metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricSpec {
    /// Generalized overlap score with penalty weights for gt-only area
    /// (`alpha`) and det-only area (`beta`). Weights must be non-negative.
    Tversky { alpha: f64, beta: f64 },
    Iou,
    Dice,
    Iog,
    Bep1,
    Bep2,
    X1,
    X2,
    Y1,
    Y2,
}

impl MetricSpec {
    /// Scores a pair under this metric. Always in `[0, 1]`.
    pub fn score(&self, gt: &BBox, det: &BBox) -> f64 {
        match *self {
            MetricSpec::Tversky { alpha, beta } => tversky(gt, det, alpha, beta),
            MetricSpec::Iou => tversky(gt, det, 1.0, 1.0),
            MetricSpec::Dice => tversky(gt, det, 0.5, 0.5),
            MetricSpec::Iog => tversky(gt, det, 1.0, 0.0),
            MetricSpec::Bep1 => bep1(gt, det).score,
            MetricSpec::Bep2 => bep2(gt, det).score,
            MetricSpec::X1 => x1_component(gt, det),
            MetricSpec::X2 => x2_component(gt, det),
            MetricSpec::Y1 => y1_component(gt, det),
            MetricSpec::Y2 => y2_component(gt, det),
        }
    }

    /// True for the metrics whose pair agreement is judged on horizontal
    /// span and bottom edge rather than on the area decomposition.
    pub fn is_bottom_edge_family(&self) -> bool {
        matches!(
            self,
            MetricSpec::Bep1
                | MetricSpec::Bep2
                | MetricSpec::X1
                | MetricSpec::X2
                | MetricSpec::Y1
                | MetricSpec::Y2
        )
    }

    /// True only for the two product metrics that accept dual thresholds.
    pub fn is_bep_product(&self) -> bool {
        matches!(self, MetricSpec::Bep1 | MetricSpec::Bep2)
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MetricSpec::Tversky { alpha, beta } => write!(f, "tversky:{alpha},{beta}"),
            MetricSpec::Iou => write!(f, "iou"),
            MetricSpec::Dice => write!(f, "dice"),
            MetricSpec::Iog => write!(f, "iog"),
            MetricSpec::Bep1 => write!(f, "bep1"),
            MetricSpec::Bep2 => write!(f, "bep2"),
            MetricSpec::X1 => write!(f, "x1"),
            MetricSpec::X2 => write!(f, "x2"),
            MetricSpec::Y1 => write!(f, "y1"),
            MetricSpec::Y2 => write!(f, "y2"),
        }
    }
}

impl FromStr for MetricSpec {
    type Err = Error;

    /// Parses `iou`, `dice`, `iog`, `bep1`, `bep2`, `x1`, `x2`, `y1`, `y2`,
    /// or `tversky:<alpha>,<beta>` with non-negative finite weights.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let spec = match lower.as_str() {
            "iou" => MetricSpec::Iou,
            "dice" => MetricSpec::Dice,
            "iog" => MetricSpec::Iog,
            "bep1" => MetricSpec::Bep1,
            "bep2" => MetricSpec::Bep2,
            "x1" => MetricSpec::X1,
            "x2" => MetricSpec::X2,
            "y1" => MetricSpec::Y1,
            "y2" => MetricSpec::Y2,
            _ => {
                let weights = lower
                    .strip_prefix("tversky:")
                    .ok_or_else(|| Error::UnknownMetric(s.to_string()))?;
                let (a, b) = weights
                    .split_once(',')
                    .ok_or_else(|| Error::UnknownMetric(s.to_string()))?;
                let alpha: f64 = a.trim().parse().map_err(|_| Error::UnknownMetric(s.to_string()))?;
                let beta: f64 = b.trim().parse().map_err(|_| Error::UnknownMetric(s.to_string()))?;
                if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0) {
                    return Err(Error::UnknownMetric(s.to_string()));
                }
                MetricSpec::Tversky { alpha, beta }
            }
        };
        Ok(spec)
    }
}

/// Tversky score `b / (b + alpha*a + beta*c)` over the area decomposition.
///
/// A pair with no shared area scores 0 (this also covers the 0/0 weight
/// corner). Panics if a weight is negative or NaN; weights are a caller
/// contract, not runtime data.
pub fn tversky(gt: &BBox, det: &BBox, alpha: f64, beta: f64) -> f64 {
    assert!(
        alpha >= 0.0 && beta >= 0.0,
        "tversky weights must be non-negative"
    );
    let d = decompose_areas(gt, det);
    if d.shared == 0.0 {
        return 0.0;
    }
    // Grouping keeps the weighted penalties in one commutative sum, so
    // swapping (gt, alpha) with (det, beta) reproduces the exact same value.
    d.shared / (d.shared + (alpha * d.gt_only + beta * d.do_only))
}

/// Intersection over union: [`tversky`] with both weights 1.
pub fn iou(gt: &BBox, det: &BBox) -> f64 {
    tversky(gt, det, 1.0, 1.0)
}

/// Dice coefficient: [`tversky`] with both weights 0.5.
pub fn dice(gt: &BBox, det: &BBox) -> f64 {
    tversky(gt, det, 0.5, 0.5)
}

/// Intersection over ground truth: [`tversky`] with weights 1, 0.
pub fn iog(gt: &BBox, det: &BBox) -> f64 {
    tversky(gt, det, 1.0, 0.0)
}

/// Score and components of a bottom-edge proximity metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BepScore {
    /// Product of the two components.
    pub score: f64,
    /// Horizontal-span agreement component.
    pub x: f64,
    /// Bottom-edge agreement component.
    pub y: f64,
}

fn x1_component(gt: &BBox, det: &BBox) -> f64 {
    let d = decompose_horizontal(gt, det);
    d.shared / (d.gt_only + d.shared + d.do_only)
}

fn x2_component(gt: &BBox, det: &BBox) -> f64 {
    let d = decompose_horizontal(gt, det);
    d.shared / (d.gt_only + d.shared)
}

fn y1_component(gt: &BBox, det: &BBox) -> f64 {
    let gap = bottom_edge_gap(gt, det);
    (1.0 - gap / gt.height().min(det.height())).clamp(0.0, 1.0)
}

fn y2_component(gt: &BBox, det: &BBox) -> f64 {
    let gap = bottom_edge_gap(gt, det);
    (1.0 - gap / gt.height()).clamp(0.0, 1.0)
}

/// Strict bottom-edge proximity: `X1 * Y1`.
///
/// `X1` divides the shared span by the union of both spans, so width
/// over-estimation is penalized. `Y1` normalizes the bottom-edge gap by the
/// smaller of the two heights and clamps into `[0, 1]`.
pub fn bep1(gt: &BBox, det: &BBox) -> BepScore {
    let x = x1_component(gt, det);
    let y = y1_component(gt, det);
    BepScore { score: x * y, x, y }
}

/// Ground-truth-allied bottom-edge proximity: `X2 * Y2`.
///
/// `X2` divides the shared span by the ground-truth span alone, so widening
/// past the target (wake pickup) is not penalized. `Y2` normalizes the
/// bottom-edge gap by the ground-truth height and clamps into `[0, 1]`.
pub fn bep2(gt: &BBox, det: &BBox) -> BepScore {
    let x = x2_component(gt, det);
    let y = y2_component(gt, det);
    BepScore { score: x * y, x, y }
}

/// Dense binary foreground mask for pixel-level scoring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    /// Wraps a row-major bit buffer; its length must equal `width * height`.
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        let expected = width * height;
        if bits.len() != expected {
            return Err(Error::MaskLengthMismatch {
                width,
                height,
                expected,
                got: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// Builds a mask by evaluating `f(col, row)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                bits.push(f(col, row));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    /// Rasterizes a box onto a `width x height` grid. A pixel is foreground
    /// when its unit square `[col, col+1) x [row, row+1)` overlaps the box
    /// with positive area; for integer boxes this is exactly
    /// `x <= col < x+w`, `y <= row < y+h`.
    pub fn rasterize(width: usize, height: usize, bbox: &BBox) -> Self {
        Self::from_fn(width, height, |col, row| {
            let (cf, rf) = (col as f64, row as f64);
            cf + 1.0 > bbox.x() && cf < bbox.right() && rf + 1.0 > bbox.y() && rf < bbox.bottom()
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        assert!(col < self.width && row < self.height, "pixel out of bounds");
        self.bits[row * self.width + col]
    }
}

/// Tversky score over pixel sets instead of box areas: `a`, `b`, `c` become
/// cardinalities of gt-only, shared, and det-only foreground pixels.
///
/// Errors on mismatched dimensions and on a ground truth with no foreground
/// (an empty ground truth has no meaningful overlap ratio).
pub fn tversky_mask(gt: &BinaryMask, det: &BinaryMask, alpha: f64, beta: f64) -> Result<f64> {
    assert!(
        alpha >= 0.0 && beta >= 0.0,
        "tversky weights must be non-negative"
    );
    if gt.width != det.width || gt.height != det.height {
        return Err(Error::MaskDimensionMismatch(
            gt.width, gt.height, det.width, det.height,
        ));
    }
    let (mut a, mut b, mut c) = (0u64, 0u64, 0u64);
    for (g, d) in gt.bits.iter().zip(det.bits.iter()) {
        match (g, d) {
            (true, true) => b += 1,
            (true, false) => a += 1,
            (false, true) => c += 1,
            (false, false) => {}
        }
    }
    if a + b == 0 {
        return Err(Error::EmptyGroundTruthMask);
    }
    if b == 0 {
        return Ok(0.0);
    }
    let (a, b, c) = (a as f64, b as f64, c as f64);
    Ok(b / (b + (alpha * a + beta * c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BBox {
        BBox::new(x, y, w, h).unwrap()
    }

    const EPS: f64 = 1e-12;

    // ---------------- tversky on boxes ----------------

    #[test]
    fn half_shift_presets() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let d = bb(5.0, 0.0, 10.0, 10.0);
        assert!((tversky(&g, &d, 1.0, 1.0) - 1.0 / 3.0).abs() < EPS);
        assert!((tversky(&g, &d, 0.5, 0.5) - 0.5).abs() < EPS);
    }

    #[test]
    fn covered_ground_truth_scores_full_iog() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let d = bb(-5.0, 0.0, 20.0, 10.0);
        assert_eq!(tversky(&g, &d, 1.0, 0.0), 1.0);
    }

    #[test]
    fn identical_boxes_score_one_for_any_weights() {
        let g = bb(3.0, 4.0, 7.0, 2.0);
        assert_eq!(tversky(&g, &g, 1.0, 1.0), 1.0);
        assert_eq!(tversky(&g, &g, 0.0, 0.0), 1.0);
        assert_eq!(tversky(&g, &g, 3.5, 0.25), 1.0);
    }

    #[test]
    fn disjoint_boxes_score_zero_even_with_zero_weights() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let d = bb(50.0, 50.0, 5.0, 5.0);
        // b = 0 would make 0/0 with alpha = beta = 0; defined as 0.
        assert_eq!(tversky(&g, &d, 0.0, 0.0), 0.0);
        assert_eq!(tversky(&g, &d, 1.0, 1.0), 0.0);
    }

    #[test]
    #[should_panic(expected = "non-negative")]
    fn negative_weight_panics() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        tversky(&g, &g, -1.0, 0.0);
    }

    #[test]
    fn swap_symmetry_is_exact() {
        let g = bb(1.0, 2.0, 9.0, 4.0);
        let d = bb(3.0, 1.0, 6.0, 8.0);
        let (alpha, beta) = (0.3, 1.7);
        assert_eq!(tversky(&g, &d, alpha, beta), tversky(&d, &g, beta, alpha));
    }

    // ---------------- bep components ----------------

    #[test]
    fn half_shift_bep1() {
        let s = bep1(&bb(0.0, 0.0, 10.0, 10.0), &bb(5.0, 0.0, 10.0, 10.0));
        assert!((s.x - 1.0 / 3.0).abs() < EPS);
        assert_eq!(s.y, 1.0);
        assert!((s.score - 1.0 / 3.0).abs() < EPS);
    }

    #[test]
    fn top_sliver_detection_clamps_y1_to_zero() {
        // Bottom gap 6 exceeds the smaller height 4, so Y1 clamps at 0.
        let s = bep1(&bb(0.0, 0.0, 10.0, 10.0), &bb(0.0, 0.0, 10.0, 4.0));
        assert_eq!(s.x, 1.0);
        assert_eq!(s.y, 0.0);
        assert_eq!(s.score, 0.0);
    }

    #[test]
    fn identical_boxes_max_out_both_products() {
        let g = bb(2.0, 2.0, 8.0, 5.0);
        assert_eq!(bep1(&g, &g), BepScore { score: 1.0, x: 1.0, y: 1.0 });
        assert_eq!(bep2(&g, &g), BepScore { score: 1.0, x: 1.0, y: 1.0 });
    }

    #[test]
    fn widened_detection_only_penalized_by_bep1() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let d = bb(-5.0, 0.0, 20.0, 10.0);
        assert_eq!(bep2(&g, &d), BepScore { score: 1.0, x: 1.0, y: 1.0 });
        let s = bep1(&g, &d);
        assert!((s.x - 0.5).abs() < EPS);
        assert_eq!(s.y, 1.0);
        assert!((s.score - 0.5).abs() < EPS);
    }

    #[test]
    fn lowered_detection_scales_y() {
        let s = bep2(&bb(0.0, 0.0, 10.0, 10.0), &bb(0.0, 2.0, 10.0, 10.0));
        assert_eq!(s.x, 1.0);
        assert!((s.y - 0.8).abs() < EPS);
        assert!((s.score - 0.8).abs() < EPS);
    }

    #[test]
    fn y_gap_larger_than_gt_height_clamps_y2() {
        // Gap 50 against height 40 would go negative without the clamp.
        let s = bep2(&bb(0.0, 0.0, 100.0, 40.0), &bb(0.0, 0.0, 100.0, 90.0));
        assert_eq!(s.y, 0.0);
        assert_eq!(s.score, 0.0);
    }

    // ---------------- dispatch ----------------

    #[test]
    fn presets_expand_exactly() {
        let g = bb(1.0, 5.0, 13.0, 6.0);
        let d = bb(4.0, 2.0, 9.0, 11.0);
        assert_eq!(MetricSpec::Iou.score(&g, &d), tversky(&g, &d, 1.0, 1.0));
        assert_eq!(MetricSpec::Dice.score(&g, &d), tversky(&g, &d, 0.5, 0.5));
        assert_eq!(MetricSpec::Iog.score(&g, &d), tversky(&g, &d, 1.0, 0.0));
    }

    #[test]
    fn component_metrics_match_breakdowns() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let d = bb(0.0, 2.0, 10.0, 10.0);
        assert_eq!(MetricSpec::Y2.score(&g, &d), bep2(&g, &d).y);
        assert_eq!(MetricSpec::X1.score(&g, &d), bep1(&g, &d).x);
        assert!((MetricSpec::Y2.score(&g, &d) - 0.8).abs() < EPS);
    }

    #[test]
    fn x2_is_zero_for_horizontally_disjoint_boxes() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let d = bb(30.0, 0.0, 10.0, 10.0);
        assert_eq!(MetricSpec::X2.score(&g, &d), 0.0);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for name in ["iou", "dice", "iog", "bep1", "bep2", "x1", "x2", "y1", "y2"] {
            let spec: MetricSpec = name.parse().unwrap();
            assert_eq!(spec.to_string(), name);
        }
        let t: MetricSpec = "tversky:1,0.5".parse().unwrap();
        assert_eq!(t, MetricSpec::Tversky { alpha: 1.0, beta: 0.5 });
        assert_eq!(t.to_string(), "tversky:1,0.5");
        assert!("tversky:-1,0".parse::<MetricSpec>().is_err());
        assert!("tversky:1".parse::<MetricSpec>().is_err());
        assert!("giou".parse::<MetricSpec>().is_err());
    }

    // ---------------- masks ----------------

    #[test]
    fn mask_length_must_match_dimensions() {
        assert!(BinaryMask::new(4, 3, vec![false; 12]).is_ok());
        assert!(BinaryMask::new(4, 3, vec![false; 11]).is_err());
    }

    #[test]
    fn equal_masks_score_one() {
        let m = BinaryMask::rasterize(20, 20, &bb(2.0, 3.0, 5.0, 4.0));
        assert_eq!(tversky_mask(&m, &m, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn mask_matches_box_formula_on_half_shift() {
        let g = BinaryMask::rasterize(30, 30, &bb(0.0, 0.0, 10.0, 10.0));
        let d = BinaryMask::rasterize(30, 30, &bb(5.0, 0.0, 10.0, 10.0));
        let got = tversky_mask(&g, &d, 1.0, 1.0).unwrap();
        assert!((got - 1.0 / 3.0).abs() < EPS);
    }

    #[test]
    fn disjoint_masks_score_zero() {
        let g = BinaryMask::rasterize(30, 30, &bb(0.0, 0.0, 5.0, 5.0));
        let d = BinaryMask::rasterize(30, 30, &bb(20.0, 20.0, 5.0, 5.0));
        assert_eq!(tversky_mask(&g, &d, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_mask_dimensions_error() {
        let g = BinaryMask::from_fn(10, 10, |_, _| true);
        let d = BinaryMask::from_fn(10, 11, |_, _| true);
        assert!(matches!(
            tversky_mask(&g, &d, 1.0, 1.0),
            Err(Error::MaskDimensionMismatch(..))
        ));
    }

    #[test]
    fn empty_ground_truth_mask_errors() {
        let g = BinaryMask::from_fn(10, 10, |_, _| false);
        let d = BinaryMask::from_fn(10, 10, |c, _| c < 5);
        assert!(matches!(
            tversky_mask(&g, &d, 1.0, 1.0),
            Err(Error::EmptyGroundTruthMask)
        ));
    }

    #[test]
    fn rasterize_counts_unit_pixels() {
        let m = BinaryMask::rasterize(10, 10, &bb(1.0, 2.0, 3.0, 4.0));
        let count = (0..10)
            .flat_map(|r| (0..10).map(move |c| (c, r)))
            .filter(|&(c, r)| m.get(c, r))
            .count();
        assert_eq!(count, 12);
        assert!(m.get(1, 2));
        assert!(m.get(3, 5));
        assert!(!m.get(4, 2));
        assert!(!m.get(1, 6));
    }
}
