//! Greedy one-to-one assignment of detections to ground truths and the
//! true-positive criteria that label the resulting pairs.
//!
//! Pairing is driven by the criterion's metric score alone; thresholds only
//! label pairs after assignment. Raising a threshold therefore never changes
//! which pairs form, so true-positive counts are monotone in every
//! threshold. Non-maximum suppression is deliberately absent: detector
//! output is assessed as-is.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{decompose_areas, decompose_horizontal, BBox};
use crate::metrics::{bep1, bep2, MetricSpec};

/// Threshold shape of a true-positive criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode {
    /// Accept when the metric score strictly exceeds `c0`.
    Single { c0: f64 },
    /// Accept when both components strictly exceed their thresholds.
    /// Only meaningful for the product metrics `bep1` and `bep2`.
    Dual { x0: f64, y0: f64 },
}

/// A validated metric + threshold rule deciding which matched pairs count
/// as true positives.
///
/// Construction enforces that thresholds lie in `[0, 1]` and that dual
/// thresholds are only combined with `bep1`/`bep2`, so a criterion in hand
/// is always usable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpCriterion {
    metric: MetricSpec,
    mode: ThresholdMode,
}

fn check_threshold(value: f64) -> Result<f64> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::ThresholdOutOfRange { value });
    }
    Ok(value)
}

impl TpCriterion {
    pub fn single(metric: MetricSpec, c0: f64) -> Result<Self> {
        Ok(Self {
            metric,
            mode: ThresholdMode::Single {
                c0: check_threshold(c0)?,
            },
        })
    }

    pub fn dual(metric: MetricSpec, x0: f64, y0: f64) -> Result<Self> {
        if !metric.is_bep_product() {
            return Err(Error::DualRequiresBep(metric.to_string()));
        }
        Ok(Self {
            metric,
            mode: ThresholdMode::Dual {
                x0: check_threshold(x0)?,
                y0: check_threshold(y0)?,
            },
        })
    }

    pub fn metric(&self) -> MetricSpec {
        self.metric
    }

    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }

    /// Direct criterion decision for one pair, as used to label matched
    /// pairs. A pair without qualifying overlap (see [`pairing_overlap`])
    /// is never a true positive, which keeps this equal to the matching
    /// outcome on single-gt/single-det frames.
    pub fn is_pair_tp(&self, gt: &BBox, det: &BBox) -> bool {
        if !pairing_overlap(self.metric, gt, det) {
            return false;
        }
        match self.mode {
            ThresholdMode::Single { c0 } => self.metric.score(gt, det) > c0,
            ThresholdMode::Dual { x0, y0 } => {
                let s = match self.metric {
                    MetricSpec::Bep1 => bep1(gt, det),
                    MetricSpec::Bep2 => bep2(gt, det),
                    // Dual mode is unreachable for other metrics by construction.
                    _ => unreachable!("dual criterion with non-BEP metric"),
                };
                s.x > x0 && s.y > y0
            }
        }
    }

    /// Compact display label, e.g. `iou(0.5)` or `bep2(0.7,0.75)`.
    /// Thresholds are shown with at most four decimals.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

fn fmt_threshold(v: f64) -> String {
    let mut s = format!("{v:.4}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.push('0');
    }
    s
}

impl fmt::Display for TpCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            ThresholdMode::Single { c0 } => {
                write!(f, "{}({})", self.metric, fmt_threshold(c0))
            }
            ThresholdMode::Dual { x0, y0 } => {
                write!(f, "{}({},{})", self.metric, fmt_threshold(x0), fmt_threshold(y0))
            }
        }
    }
}

impl FromStr for TpCriterion {
    type Err = Error;

    /// Parses `<metric>@<c0>` or `<metric>@<x0>,<y0>`, e.g. `iou@0.5`,
    /// `bep2@0.7,0.75`, `tversky:1,0.5@0.6`. The label form produced by
    /// [`TpCriterion::label`], e.g. `iou(0.5)`, is accepted as well.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidCriterion(s.to_string(), msg.to_string());
        let label_form = s
            .strip_suffix(')')
            .and_then(|rest| rest.split_once('('))
            .filter(|(metric, _)| !metric.contains('@'));
        let (metric_part, thresholds) = match label_form {
            Some(parts) => parts,
            None => s.rsplit_once('@').ok_or_else(|| {
                bad("expected '<metric>@<threshold>' or '<metric>@<x0>,<y0>'")
            })?,
        };
        let metric: MetricSpec = metric_part.parse()?;
        let parse_num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("'{t}' is not a number")))
        };
        match thresholds.split_once(',') {
            None => TpCriterion::single(metric, parse_num(thresholds)?),
            Some((x, y)) => TpCriterion::dual(metric, parse_num(x)?, parse_num(y)?),
        }
    }
}

/// One accepted ground-truth/detection pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub gt_index: usize,
    pub do_index: usize,
    /// The criterion metric's score for the pair.
    pub score: f64,
    /// Whether the pair passes the criterion thresholds.
    pub is_tp: bool,
}

/// Outcome of matching one frame.
///
/// Every ground truth and detection appears exactly once: either inside
/// `pairs` or in the corresponding unmatched list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchResult {
    /// Accepted pairs in acceptance (descending score) order.
    pub pairs: Vec<MatchedPair>,
    /// Ground truths left without a detection (missed objects).
    pub unmatched_gt: Vec<usize>,
    /// Detections left without a ground truth (false positives).
    pub unmatched_do: Vec<usize>,
}

impl MatchResult {
    pub fn tp_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_tp).count()
    }
}

/// Whether a pair has enough overlap to be considered for assignment.
///
/// Area metrics require shared area; span/bottom-edge metrics require
/// shared horizontal span. Matching a pair with no such overlap would
/// consume a ground truth meaninglessly (a bottom-aligned box on the other
/// side of the image must not claim a match under a Y-only criterion).
fn pairing_overlap(metric: MetricSpec, gt: &BBox, det: &BBox) -> bool {
    if metric.is_bottom_edge_family() {
        decompose_horizontal(gt, det).shared > 0.0
    } else {
        decompose_areas(gt, det).shared > 0.0
    }
}

/// Greedy one-to-one assignment of detections to ground truths.
///
/// All pairs with qualifying overlap are ranked by metric score, descending,
/// with ties broken by lower gt index then lower detection index. Pairs are
/// accepted greedily, skipping boxes already consumed; accepted pairs are
/// then labeled via [`TpCriterion::is_pair_tp`]. Matching never looks at
/// thresholds, so tightening a threshold can only relabel pairs, not
/// reshuffle them.
pub fn match_frame(gts: &[BBox], dets: &[BBox], criterion: &TpCriterion) -> MatchResult {
    let metric = criterion.metric();
    let mut candidates = Vec::new();
    for (gi, gt) in gts.iter().enumerate() {
        for (di, det) in dets.iter().enumerate() {
            if pairing_overlap(metric, gt, det) {
                candidates.push((metric.score(gt, det), gi, di));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut gt_used = vec![false; gts.len()];
    let mut do_used = vec![false; dets.len()];
    let mut pairs = Vec::new();
    for (score, gi, di) in candidates {
        if gt_used[gi] || do_used[di] {
            continue;
        }
        gt_used[gi] = true;
        do_used[di] = true;
        pairs.push(MatchedPair {
            gt_index: gi,
            do_index: di,
            score,
            is_tp: criterion.is_pair_tp(&gts[gi], &dets[di]),
        });
    }
    MatchResult {
        pairs,
        unmatched_gt: (0..gts.len()).filter(|&i| !gt_used[i]).collect(),
        unmatched_do: (0..dets.len()).filter(|&i| !do_used[i]).collect(),
    }
}
