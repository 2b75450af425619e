//! Detection assessment for maritime video: overlap metrics, bottom-edge
//! proximity metrics, and a matching/evaluation protocol built on them.
//!
//! Plain overlap ratios punish detectors for missing a vessel's
//! superstructure or for swallowing its wake, even when the hull, the part
//! that touches the waterline, is localized well. The bottom-edge
//! proximity scores in [`metrics`] instead reward horizontal agreement and
//! bottom-edge alignment, which is what downstream range estimation from a
//! camera actually needs.
//!
//! The crate is organized as a pipeline:
//!
//! * [`geometry`]: axis-aligned boxes and the exact area/width overlap
//!   decompositions every metric is defined on.
//! * [`metrics`]: the generalized overlap family (`tversky`, with `iou`,
//!   `dice`, `iog` presets) and the bottom-edge family (`bep1`, `bep2` and
//!   their horizontal/vertical components), plus a rasterized mask variant.
//! * [`matching`]: true-positive criteria and greedy one-to-one matching
//!   of detections to ground truths within a frame.
//! * [`evaluation`]: dataset-level micro-averaged precision/recall,
//!   min-size filtering, and threshold sweeps.
//! * [`annotations`]: the JSON-lines annotation format used by the tools.
//! * [`scenarios`]: built-in qualitative fixtures with frozen verdicts.
//!
//! # Quick start
//!
//! ```
//! use bepeval::{BBox, MetricSpec, TpCriterion};
//! use bepeval::evaluation::{evaluate_dataset, Frame, DEFAULT_MIN_SIZE_PX};
//!
//! // A detector that finds the hull but not the mast.
//! let gt = BBox::new(40.0, 20.0, 100.0, 60.0)?;
//! let det = BBox::new(40.0, 60.0, 100.0, 20.0)?;
//!
//! assert!(bepeval::iou(&gt, &det) < 0.5); // rejected by overlap
//! let bep = bepeval::bep2(&gt, &det);
//! assert_eq!(bep.score, 1.0); // perfect width and bottom-edge agreement
//!
//! let criterion = TpCriterion::dual(MetricSpec::Bep2, 0.7, 0.75)?;
//! let frames = vec![Frame { ground_truths: vec![gt], detections: vec![det] }];
//! let report = evaluate_dataset(&frames, &criterion, DEFAULT_MIN_SIZE_PX);
//! assert_eq!(report.totals.precision(), Some(1.0));
//! assert_eq!(report.totals.recall(), Some(1.0));
//! # Ok::<(), bepeval::Error>(())
//! ```

pub mod annotations;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod matching;
pub mod metrics;
pub mod scenarios;

pub use annotations::{AnnotatedBox, AnnotatedFrame};
pub use error::{Error, Result};
pub use evaluation::{DatasetReport, EvalCounts, Frame, SweepGrid, ThresholdGrid};
pub use geometry::{BBox, HorizontalDecomposition, OverlapDecomposition};
pub use matching::{match_frame, MatchResult, MatchedPair, ThresholdMode, TpCriterion};
pub use metrics::{bep1, bep2, dice, iog, iou, tversky, BepScore, BinaryMask, MetricSpec};
pub use scenarios::{builtin_scenarios, ScenarioFixture, Verdict};
