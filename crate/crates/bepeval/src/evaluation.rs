//! Dataset-level aggregation: micro-averaged precision/recall under one
//! criterion, and threshold sweeps.
//!
//! Counts are accumulated over all frames first (micro-averaging):
//! precision = total TP / total detections, recall = total TP / total ground
//! truths. A zero denominator yields `None`, which renderers print as an
//! explicit NA token rather than a fake 0 or 1.

use std::collections::BTreeMap;

use crate::annotations::AnnotatedFrame;
use crate::error::Result;
use crate::geometry::BBox;
use crate::matching::{match_frame, TpCriterion};
use crate::metrics::MetricSpec;

/// Detections narrower or shorter than this many pixels are dropped by
/// default before matching.
pub const DEFAULT_MIN_SIZE_PX: f64 = 20.0;

/// One frame's worth of evaluation input.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Frame {
    pub ground_truths: Vec<BBox>,
    pub detections: Vec<BBox>,
}

/// Micro-averaged counting state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalCounts {
    pub tp: usize,
    /// Detections considered (after min-size filtering).
    pub n_do: usize,
    pub n_gt: usize,
}

impl EvalCounts {
    pub fn precision(&self) -> Option<f64> {
        (self.n_do > 0).then(|| self.tp as f64 / self.n_do as f64)
    }

    pub fn recall(&self) -> Option<f64> {
        (self.n_gt > 0).then(|| self.tp as f64 / self.n_gt as f64)
    }

    fn add(&mut self, other: EvalCounts) {
        self.tp += other.tp;
        self.n_do += other.n_do;
        self.n_gt += other.n_gt;
    }
}

/// Evaluation outcome for a dataset under one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetReport {
    pub criterion: TpCriterion,
    pub totals: EvalCounts,
    /// Per-video breakdown in video-id order; empty when the input carries
    /// no video identity.
    pub per_video: Vec<(String, EvalCounts)>,
}

/// Keeps only detections at least `min_px` wide and `min_px` tall.
/// Ground truths are never filtered.
pub fn filter_min_size(dets: &[BBox], min_px: f64) -> Vec<BBox> {
    debug_assert!(min_px >= 0.0, "min_px must be non-negative");
    dets.iter()
        .copied()
        .filter(|d| d.width() >= min_px && d.height() >= min_px)
        .collect()
}

fn evaluate_frame(frame: &Frame, criterion: &TpCriterion, min_px: f64) -> EvalCounts {
    let dets = filter_min_size(&frame.detections, min_px);
    let result = match_frame(&frame.ground_truths, &dets, criterion);
    EvalCounts {
        tp: result.tp_count(),
        n_do: dets.len(),
        n_gt: frame.ground_truths.len(),
    }
}

/// Matches every frame independently and micro-averages the counts.
pub fn evaluate_dataset(frames: &[Frame], criterion: &TpCriterion, min_px: f64) -> DatasetReport {
    let mut totals = EvalCounts::default();
    for frame in frames {
        totals.add(evaluate_frame(frame, criterion, min_px));
    }
    DatasetReport {
        criterion: *criterion,
        totals,
        per_video: Vec::new(),
    }
}

/// Pairs two annotation sets by `(video_id, frame_index)`.
///
/// The join is outer: a frame present on one side only is evaluated against
/// an empty other side, so missed videos hurt recall and spurious ones hurt
/// precision. Returns `(video_id, frame_index, frame)` sorted by key.
pub fn pair_annotations(
    gt: &[AnnotatedFrame],
    det: &[AnnotatedFrame],
) -> Vec<(String, u64, Frame)> {
    let mut joined: BTreeMap<(String, u64), Frame> = BTreeMap::new();
    for f in gt {
        joined
            .entry((f.video_id.clone(), f.frame_index))
            .or_default()
            .ground_truths
            .extend(f.boxes.iter().map(|b| b.bbox));
    }
    for f in det {
        joined
            .entry((f.video_id.clone(), f.frame_index))
            .or_default()
            .detections
            .extend(f.boxes.iter().map(|b| b.bbox));
    }
    joined
        .into_iter()
        .map(|((video, index), frame)| (video, index, frame))
        .collect()
}

/// Evaluates annotated ground truth against annotated detections, keyed by
/// `(video_id, frame_index)`, with a per-video breakdown.
pub fn evaluate_annotations(
    gt: &[AnnotatedFrame],
    det: &[AnnotatedFrame],
    criterion: &TpCriterion,
    min_px: f64,
) -> DatasetReport {
    let mut totals = EvalCounts::default();
    let mut per_video: BTreeMap<String, EvalCounts> = BTreeMap::new();
    for (video, _, frame) in pair_annotations(gt, det) {
        let counts = evaluate_frame(&frame, criterion, min_px);
        totals.add(counts);
        per_video.entry(video).or_default().add(counts);
    }
    DatasetReport {
        criterion: *criterion,
        totals,
        per_video: per_video.into_iter().collect(),
    }
}

/// Threshold axes for [`sweep`]. Single-threshold Tversky-family metrics
/// draw from `c0`; `x1`/`x2` draw from `x0`; `y1`/`y2` draw from `y0`;
/// `bep1`/`bep2` take the full `x0` x `y0` product.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    pub c0: Vec<f64>,
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
}

impl Default for ThresholdGrid {
    /// The published comparison grid: c0 in {0.5, 0.7, 0.9}, x0 in
    /// {sqrt(0.5), sqrt(0.7), sqrt(0.9)}, y0 in {0.6, 0.75, 0.9}.
    fn default() -> Self {
        Self {
            c0: vec![0.5, 0.7, 0.9],
            x0: vec![(0.5f64).sqrt(), (0.7f64).sqrt(), (0.9f64).sqrt()],
            y0: vec![0.6, 0.75, 0.9],
        }
    }
}

/// Default metric list for [`sweep`]; with the default grid this yields the
/// standard 33-row report.
pub fn default_sweep_metrics() -> Vec<MetricSpec> {
    vec![
        MetricSpec::Iou,
        MetricSpec::Dice,
        MetricSpec::Iog,
        MetricSpec::Bep1,
        MetricSpec::Bep2,
        MetricSpec::Y1,
        MetricSpec::Y2,
    ]
}

/// One sweep row: a concrete criterion and its dataset counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub criterion: TpCriterion,
    pub counts: EvalCounts,
}

/// All sweep rows, in metric order then threshold order (for the dual
/// metrics: y0 outermost, x0 innermost, matching the published layout).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub rows: Vec<SweepRow>,
}

/// Evaluates every metric over its threshold axis. Errors only on invalid
/// grid values (thresholds outside `[0, 1]`).
pub fn sweep(
    frames: &[Frame],
    metrics: &[MetricSpec],
    grid: &ThresholdGrid,
    min_px: f64,
) -> Result<SweepGrid> {
    let mut criteria = Vec::new();
    for &metric in metrics {
        match metric {
            MetricSpec::Bep1 | MetricSpec::Bep2 => {
                for &y0 in &grid.y0 {
                    for &x0 in &grid.x0 {
                        criteria.push(TpCriterion::dual(metric, x0, y0)?);
                    }
                }
            }
            MetricSpec::X1 | MetricSpec::X2 => {
                for &x0 in &grid.x0 {
                    criteria.push(TpCriterion::single(metric, x0)?);
                }
            }
            MetricSpec::Y1 | MetricSpec::Y2 => {
                for &y0 in &grid.y0 {
                    criteria.push(TpCriterion::single(metric, y0)?);
                }
            }
            _ => {
                for &c0 in &grid.c0 {
                    criteria.push(TpCriterion::single(metric, c0)?);
                }
            }
        }
    }
    let rows = criteria
        .into_iter()
        .map(|criterion| SweepRow {
            counts: evaluate_dataset(frames, &criterion, min_px).totals,
            criterion,
        })
        .collect();
    Ok(SweepGrid { rows })
}
