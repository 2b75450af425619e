//! Batch assessment front end: score single box pairs, compare criterion
//! verdicts over example frames, evaluate annotated datasets, and run
//! threshold sweeps.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or flag values),
//! 2 data error (unreadable or invalid input files). Reports go to stdout
//! unless `--output` is given, and are byte-identical across runs on the
//! same inputs.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bepeval::annotations::{
    load_annotations, serialize_annotations, write_annotations, AnnotatedBox, AnnotatedFrame,
};
use bepeval::evaluation::{
    evaluate_annotations, pair_annotations, sweep, Frame, ThresholdGrid, DEFAULT_MIN_SIZE_PX,
};
use bepeval::geometry::BBox;
use bepeval::matching::TpCriterion;
use bepeval::metrics::{bep1, bep2, MetricSpec};
use bepeval::scenarios::{
    builtin_scenarios, frame_verdict, standard_criteria, Verdict, REFERENCE_ROW,
};
use clap::{Parser, Subcommand};
use render::{
    render_compare, render_evaluate, render_score, render_sweep, CompareReport, CompareRow,
    Format, ScoreRow,
};

#[derive(Parser)]
#[command(
    name = "bepeval",
    version,
    about = "Detection assessment with overlap and bottom-edge proximity metrics"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one ground-truth/detection box pair under selected metrics.
    Score {
        /// Ground-truth box as x,y,w,h.
        #[arg(long, value_name = "X,Y,W,H")]
        gt: String,
        /// Detection box as x,y,w,h.
        #[arg(long, value_name = "X,Y,W,H")]
        det: String,
        /// Comma-separated metrics: iou, dice, iog, bep1, bep2, x1, x2,
        /// y1, y2, tversky:<alpha>,<beta>. Repeatable.
        #[arg(long, value_name = "LIST", default_value = "iou,dice,iog,bep1,bep2")]
        metric: Vec<String>,
    },
    /// Produce a TP/FP verdict grid across example frames, one row per
    /// criterion, with success counts against a reference row.
    Compare {
        /// Ground-truth annotation file; defaults to the builtin scenarios.
        #[arg(long, value_name = "PATH", requires = "det_file")]
        gt_file: Option<PathBuf>,
        /// Detection annotation file.
        #[arg(long, value_name = "PATH", requires = "gt_file")]
        det_file: Option<PathBuf>,
        /// Criterion as <metric>@<c0> or <metric>@<x0>,<y0>. Repeatable;
        /// defaults to the nine standard criteria.
        #[arg(long = "criterion", value_name = "CRITERION")]
        criteria: Vec<String>,
        /// Verdict row to count successes against: "maritime-cv" (builtin
        /// scenarios only) or one of the computed criterion labels.
        #[arg(long, value_name = "ROW")]
        reference: Option<String>,
    },
    /// Micro-averaged precision/recall of a detection file against a
    /// ground-truth file under one criterion.
    Evaluate {
        /// Ground-truth annotation file.
        #[arg(long, value_name = "PATH")]
        gt_file: PathBuf,
        /// Detection annotation file.
        #[arg(long, value_name = "PATH")]
        det_file: PathBuf,
        /// Criterion as <metric>@<c0> or <metric>@<x0>,<y0>.
        #[arg(long, value_name = "CRITERION", default_value = "bep2@0.7,0.75")]
        criterion: String,
        /// Drop detections narrower or shorter than this many pixels.
        #[arg(long, value_name = "PX", default_value_t = DEFAULT_MIN_SIZE_PX)]
        min_size: f64,
        /// Emit one row per video before the dataset total row.
        #[arg(long)]
        per_video: bool,
    },
    /// Evaluate a grid of thresholds per metric (default: 33 rows).
    Sweep {
        /// Ground-truth annotation file.
        #[arg(long, value_name = "PATH")]
        gt_file: PathBuf,
        /// Detection annotation file.
        #[arg(long, value_name = "PATH")]
        det_file: PathBuf,
        /// Comma-separated metrics to sweep. Repeatable.
        #[arg(long, value_name = "LIST", default_value = "iou,dice,iog,bep1,bep2,y1,y2")]
        metric: Vec<String>,
        /// Overlap-ratio thresholds (default 0.5,0.7,0.9).
        #[arg(long, value_name = "LIST")]
        c0_grid: Option<String>,
        /// Horizontal-component thresholds (default sqrt of 0.5,0.7,0.9).
        #[arg(long, value_name = "LIST")]
        x0_grid: Option<String>,
        /// Bottom-edge-component thresholds (default 0.6,0.75,0.9).
        #[arg(long, value_name = "LIST")]
        y0_grid: Option<String>,
        /// Drop detections narrower or shorter than this many pixels.
        #[arg(long, value_name = "PX", default_value_t = DEFAULT_MIN_SIZE_PX)]
        min_size: f64,
    },
    /// Dump the builtin scenario fixtures in the annotation schema.
    Scenarios {
        /// Write the ground-truth side to this file.
        #[arg(long, value_name = "PATH")]
        gt_out: Option<PathBuf>,
        /// Write the detection side to this file.
        #[arg(long, value_name = "PATH")]
        det_out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Data(String),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let text = match cli.command {
        Command::Score { gt, det, metric } => cmd_score(&gt, &det, &metric, cli.format)?,
        Command::Compare {
            gt_file,
            det_file,
            criteria,
            reference,
        } => cmd_compare(
            gt_file.as_deref(),
            det_file.as_deref(),
            &criteria,
            reference.as_deref(),
            cli.format,
        )?,
        Command::Evaluate {
            gt_file,
            det_file,
            criterion,
            min_size,
            per_video,
        } => cmd_evaluate(&gt_file, &det_file, &criterion, min_size, per_video, cli.format)?,
        Command::Sweep {
            gt_file,
            det_file,
            metric,
            c0_grid,
            x0_grid,
            y0_grid,
            min_size,
        } => cmd_sweep(
            &gt_file,
            &det_file,
            &metric,
            [c0_grid.as_deref(), x0_grid.as_deref(), y0_grid.as_deref()],
            min_size,
            cli.format,
        )?,
        Command::Scenarios { gt_out, det_out } => {
            match cmd_scenarios(gt_out.as_deref(), det_out.as_deref())? {
                Some(text) => text,
                None => return Ok(()),
            }
        }
    };
    deliver(&text, cli.output.as_deref())
}

fn deliver(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_box(text: &str, flag: &str) -> Result<BBox, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(usage(format!("--{flag} expects four numbers as x,y,w,h, got '{text}'")));
    }
    let mut nums = [0.0f64; 4];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| usage(format!("--{flag}: '{}' is not a number", part.trim())))?;
    }
    BBox::new(nums[0], nums[1], nums[2], nums[3])
        .map_err(|e| usage(format!("--{flag}: {e}")))
}

/// Expands repeatable comma-separated metric flags. `tversky:<a>,<b>`
/// contains a comma itself, so a `tversky:` token absorbs the token after
/// it before parsing.
fn expand_metrics(values: &[String]) -> Result<Vec<MetricSpec>, CliError> {
    let mut out = Vec::new();
    for value in values {
        let mut tokens = value.split(',');
        while let Some(token) = tokens.next() {
            let token = token.trim();
            let text = if token.starts_with("tversky:") {
                match tokens.next() {
                    Some(second) => format!("{token},{}", second.trim()),
                    None => token.to_string(),
                }
            } else {
                token.to_string()
            };
            out.push(text.parse::<MetricSpec>().map_err(usage)?);
        }
    }
    Ok(out)
}

fn parse_criterion(text: &str) -> Result<TpCriterion, CliError> {
    text.parse().map_err(usage)
}

fn check_min_size(min_size: f64) -> Result<f64, CliError> {
    if !min_size.is_finite() || min_size < 0.0 {
        return Err(usage(format!("--min-size must be a non-negative number, got {min_size}")));
    }
    Ok(min_size)
}

fn load(path: &Path) -> Result<Vec<AnnotatedFrame>, CliError> {
    load_annotations(path).map_err(|e| match e {
        // Parse/validation errors already name the file and line.
        bepeval::Error::Io(io) => CliError::Data(format!("{}: {io}", path.display())),
        other => CliError::Data(other.to_string()),
    })
}

fn cmd_score(gt: &str, det: &str, metrics: &[String], format: Format) -> Result<String, CliError> {
    let gt = parse_box(gt, "gt")?;
    let det = parse_box(det, "det")?;
    let rows: Vec<ScoreRow> = expand_metrics(metrics)?
        .into_iter()
        .map(|metric| {
            let (score, x, y) = match metric {
                MetricSpec::Bep1 => {
                    let s = bep1(&gt, &det);
                    (s.score, Some(s.x), Some(s.y))
                }
                MetricSpec::Bep2 => {
                    let s = bep2(&gt, &det);
                    (s.score, Some(s.x), Some(s.y))
                }
                other => (other.score(&gt, &det), None, None),
            };
            ScoreRow { metric, score, x, y }
        })
        .collect();
    Ok(render_score(&rows, format))
}

struct Example {
    name: String,
    gts: Vec<BBox>,
    dets: Vec<BBox>,
}

fn cmd_compare(
    gt_file: Option<&Path>,
    det_file: Option<&Path>,
    criteria: &[String],
    reference: Option<&str>,
    format: Format,
) -> Result<String, CliError> {
    let criteria: Vec<TpCriterion> = if criteria.is_empty() {
        standard_criteria()
    } else {
        criteria
            .iter()
            .map(|c| parse_criterion(c))
            .collect::<Result<_, _>>()?
    };

    // (examples, stored reference verdicts when running on the builtins)
    let (examples, stored_reference): (Vec<Example>, Option<Vec<Verdict>>) =
        match (gt_file, det_file) {
            (Some(gt_path), Some(det_path)) => {
                let gt = load(gt_path)?;
                let det = load(det_path)?;
                let examples = pair_annotations(&gt, &det)
                    .into_iter()
                    .map(|(video, frame, f)| Example {
                        name: format!("{video}:{frame}"),
                        gts: f.ground_truths,
                        dets: f.detections,
                    })
                    .collect();
                (examples, None)
            }
            _ => {
                let scenarios = builtin_scenarios();
                let reference = scenarios.iter().map(|s| s.expected[REFERENCE_ROW]).collect();
                let examples = scenarios
                    .into_iter()
                    .map(|s| Example {
                        name: s.name.to_string(),
                        gts: s.ground_truths,
                        dets: s.detections,
                    })
                    .collect();
                (examples, Some(reference))
            }
        };

    let computed: Vec<(String, Vec<Verdict>)> = criteria
        .iter()
        .map(|criterion| {
            let verdicts = examples
                .iter()
                .map(|e| frame_verdict(&e.gts, &e.dets, criterion))
                .collect();
            (criterion.label(), verdicts)
        })
        .collect();

    let reference_row: Option<(String, Vec<Verdict>)> = match reference {
        Some(name) => {
            if name == REFERENCE_ROW && stored_reference.is_some() {
                stored_reference.map(|r| (REFERENCE_ROW.to_string(), r))
            } else if let Some((label, row)) = computed.iter().find(|(l, _)| l == name) {
                Some((label.clone(), row.clone()))
            } else {
                let mut available: Vec<&str> =
                    computed.iter().map(|(l, _)| l.as_str()).collect();
                if stored_reference.is_some() {
                    available.insert(0, REFERENCE_ROW);
                }
                return Err(usage(format!(
                    "--reference '{name}' matches no verdict row; available: {}",
                    available.join(", ")
                )));
            }
        }
        None => stored_reference.map(|r| (REFERENCE_ROW.to_string(), r)),
    };

    let mut rows = Vec::new();
    if let Some((name, verdicts)) = &reference_row {
        rows.push(CompareRow {
            label: name.clone(),
            verdicts: verdicts.clone(),
            successes: None,
        });
    }
    for (label, verdicts) in computed {
        let successes = reference_row
            .as_ref()
            .map(|(_, r)| verdicts.iter().zip(r).filter(|(a, b)| a == b).count());
        rows.push(CompareRow { label, verdicts, successes });
    }

    let report = CompareReport {
        example_names: examples.into_iter().map(|e| e.name).collect(),
        rows,
    };
    Ok(render_compare(&report, format))
}

fn cmd_evaluate(
    gt_file: &Path,
    det_file: &Path,
    criterion: &str,
    min_size: f64,
    per_video: bool,
    format: Format,
) -> Result<String, CliError> {
    let criterion = parse_criterion(criterion)?;
    let min_size = check_min_size(min_size)?;
    let gt = load(gt_file)?;
    let det = load(det_file)?;
    let report = evaluate_annotations(&gt, &det, &criterion, min_size);
    Ok(render_evaluate(&report, per_video, format))
}

fn parse_float_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| usage(format!("--{flag}: '{}' is not a number", part.trim())))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(usage(format!("--{flag} needs at least one value")));
    }
    Ok(values)
}

fn cmd_sweep(
    gt_file: &Path,
    det_file: &Path,
    metrics: &[String],
    [c0_grid, x0_grid, y0_grid]: [Option<&str>; 3],
    min_size: f64,
    format: Format,
) -> Result<String, CliError> {
    let metrics = expand_metrics(metrics)?;
    let min_size = check_min_size(min_size)?;
    let mut grid = ThresholdGrid::default();
    if let Some(text) = c0_grid {
        grid.c0 = parse_float_list(text, "c0-grid")?;
    }
    if let Some(text) = x0_grid {
        grid.x0 = parse_float_list(text, "x0-grid")?;
    }
    if let Some(text) = y0_grid {
        grid.y0 = parse_float_list(text, "y0-grid")?;
    }
    let gt = load(gt_file)?;
    let det = load(det_file)?;
    let frames: Vec<Frame> = pair_annotations(&gt, &det)
        .into_iter()
        .map(|(_, _, frame)| frame)
        .collect();
    // Grid values come from flags, so threshold-range failures are usage
    // errors.
    let result = sweep(&frames, &metrics, &grid, min_size).map_err(usage)?;
    Ok(render_sweep(&result, format))
}

fn scenario_annotation_frames() -> (Vec<AnnotatedFrame>, Vec<AnnotatedFrame>) {
    let to_boxes = |boxes: &[BBox]| {
        boxes
            .iter()
            .map(|b| AnnotatedBox {
                bbox: *b,
                label: "vessel".to_string(),
                object_id: None,
            })
            .collect()
    };
    let mut gt = Vec::new();
    let mut det = Vec::new();
    for scenario in builtin_scenarios() {
        gt.push(AnnotatedFrame {
            video_id: scenario.name.to_string(),
            frame_index: 0,
            boxes: to_boxes(&scenario.ground_truths),
        });
        det.push(AnnotatedFrame {
            video_id: scenario.name.to_string(),
            frame_index: 0,
            boxes: to_boxes(&scenario.detections),
        });
    }
    (gt, det)
}

/// Writes fixture annotations to the requested files, or returns the
/// combined dump (ground truths, blank line, detections) when no file
/// flags are given.
fn cmd_scenarios(
    gt_out: Option<&Path>,
    det_out: Option<&Path>,
) -> Result<Option<String>, CliError> {
    let (gt, det) = scenario_annotation_frames();
    if gt_out.is_none() && det_out.is_none() {
        return Ok(Some(format!(
            "{}\n{}",
            serialize_annotations(&gt),
            serialize_annotations(&det)
        )));
    }
    if let Some(path) = gt_out {
        write_annotations(path, &gt)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = det_out {
        write_annotations(path, &det)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(None)
}
