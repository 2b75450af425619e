//! Report rendering: CSV (RFC-4180 quoting), markdown tables, and JSON
//! lines. CSV and markdown print ratios with exactly four decimals
//! (round-half-even) and the token `NA` for undefined values; JSON lines
//! carry full-precision numbers and `null` instead.

use bepeval::evaluation::{DatasetReport, EvalCounts, SweepGrid};
use bepeval::matching::{ThresholdMode, TpCriterion};
use bepeval::metrics::MetricSpec;
use bepeval::scenarios::Verdict;
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Comma-separated values with a header row.
    Csv,
    /// Markdown table.
    #[value(alias = "markdown-table")]
    Markdown,
    /// One JSON object per line, full precision.
    #[value(alias = "json-lines")]
    Jsonl,
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

fn fmt_ratio(v: Option<f64>) -> String {
    v.map(fmt4).unwrap_or_else(|| "NA".to_string())
}

/// Threshold rendering matching criterion labels: at most four decimals,
/// trailing zeros trimmed.
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

fn csv_escape(field: &str) -> String {
    if field.contains(['"', ',', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let mut push_row = |cells: Vec<String>| {
        out.push_str(&cells.join(","));
        out.push('\n');
    };
    push_row(header.iter().map(|h| csv_escape(h)).collect());
    for row in rows {
        push_row(row.iter().map(|c| csv_escape(c)).collect());
    }
    out
}

fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let escape = |cell: &str| cell.replace('|', "\\|");
    let mut out = String::new();
    let mut push_row = |cells: Vec<String>| {
        out.push_str("| ");
        out.push_str(&cells.join(" | "));
        out.push_str(" |\n");
    };
    push_row(header.iter().map(|h| escape(h)).collect());
    push_row(header.iter().map(|_| "---".to_string()).collect());
    for row in rows {
        push_row(row.iter().map(|c| escape(c)).collect());
    }
    out
}

fn json_lines<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for row in rows {
        // Row types here are plain structs; serialization cannot fail.
        out.push_str(&serde_json::to_string(&row).expect("report row serialization"));
        out.push('\n');
    }
    out
}

// ---------------- score ----------------

pub struct ScoreRow {
    pub metric: MetricSpec,
    pub score: f64,
    /// Components, present only for the product metrics.
    pub x: Option<f64>,
    pub y: Option<f64>,
}

#[derive(Serialize)]
struct JsonScoreRow {
    metric: String,
    score: f64,
    x: Option<f64>,
    y: Option<f64>,
}

pub fn render_score(rows: &[ScoreRow], format: Format) -> String {
    let header = ["metric", "score", "x", "y"];
    match format {
        Format::Jsonl => json_lines(rows.iter().map(|r| JsonScoreRow {
            metric: r.metric.to_string(),
            score: r.score,
            x: r.x,
            y: r.y,
        })),
        text => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.metric.to_string(),
                        fmt4(r.score),
                        r.x.map(fmt4).unwrap_or_default(),
                        r.y.map(fmt4).unwrap_or_default(),
                    ]
                })
                .collect();
            if text == Format::Csv {
                csv_table(&header, &cells)
            } else {
                markdown_table(&header, &cells)
            }
        }
    }
}

// ---------------- compare ----------------

pub struct CompareRow {
    /// Criterion label, or the reference row's name.
    pub label: String,
    pub verdicts: Vec<Verdict>,
    /// Agreement count with the reference row; `None` on the reference row
    /// itself or when no reference is designated.
    pub successes: Option<usize>,
}

pub struct CompareReport {
    pub example_names: Vec<String>,
    pub rows: Vec<CompareRow>,
}

#[derive(Serialize)]
struct JsonCompareVerdict<'a> {
    example: &'a str,
    verdict: &'a str,
}

#[derive(Serialize)]
struct JsonCompareRow<'a> {
    criterion: &'a str,
    verdicts: Vec<JsonCompareVerdict<'a>>,
    successes: Option<usize>,
}

pub fn render_compare(report: &CompareReport, format: Format) -> String {
    if format == Format::Jsonl {
        return json_lines(report.rows.iter().map(|row| JsonCompareRow {
            criterion: &row.label,
            verdicts: report
                .example_names
                .iter()
                .zip(&row.verdicts)
                .map(|(example, v)| JsonCompareVerdict {
                    example,
                    verdict: match v {
                        Verdict::Tp => "TP",
                        Verdict::Fp => "FP",
                    },
                })
                .collect(),
            successes: row.successes,
        }));
    }
    let mut header: Vec<&str> = vec!["criterion"];
    header.extend(report.example_names.iter().map(String::as_str));
    header.push("successes");
    let cells: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![row.label.clone()];
            out.extend(row.verdicts.iter().map(|v| v.to_string()));
            out.push(row.successes.map(|n| n.to_string()).unwrap_or_default());
            out
        })
        .collect();
    if format == Format::Csv {
        csv_table(&header, &cells)
    } else {
        markdown_table(&header, &cells)
    }
}

// ---------------- evaluate ----------------

#[derive(Serialize)]
struct JsonEvaluateRow<'a> {
    video_id: Option<&'a str>,
    tp: usize,
    n_do: usize,
    n_gt: usize,
    precision: Option<f64>,
    recall: Option<f64>,
}

fn evaluate_cells(video_id: &str, counts: &EvalCounts) -> Vec<String> {
    vec![
        video_id.to_string(),
        counts.tp.to_string(),
        counts.n_do.to_string(),
        counts.n_gt.to_string(),
        fmt_ratio(counts.precision()),
        fmt_ratio(counts.recall()),
    ]
}

/// Renders per-video rows (when requested) followed by the dataset total
/// row, which carries an empty/`null` video id.
pub fn render_evaluate(report: &DatasetReport, per_video: bool, format: Format) -> String {
    let breakdown: &[(String, EvalCounts)] = if per_video { &report.per_video } else { &[] };
    if format == Format::Jsonl {
        let rows = breakdown
            .iter()
            .map(|(video, counts)| (Some(video.as_str()), counts))
            .chain(std::iter::once((None, &report.totals)))
            .map(|(video_id, counts)| JsonEvaluateRow {
                video_id,
                tp: counts.tp,
                n_do: counts.n_do,
                n_gt: counts.n_gt,
                precision: counts.precision(),
                recall: counts.recall(),
            });
        return json_lines(rows);
    }
    let header = ["video_id", "tp", "n_do", "n_gt", "precision", "recall"];
    let mut cells: Vec<Vec<String>> = breakdown
        .iter()
        .map(|(video, counts)| evaluate_cells(video, counts))
        .collect();
    cells.push(evaluate_cells("", &report.totals));
    if format == Format::Csv {
        csv_table(&header, &cells)
    } else {
        markdown_table(&header, &cells)
    }
}

// ---------------- sweep ----------------

/// Threshold axes of a sweep row: `(c0, x0, y0)`. Overlap-ratio criteria
/// use the `c0` axis, horizontal components and the dual products the `x0`
/// axis, vertical components and the dual products the `y0` axis.
fn sweep_axes(criterion: &TpCriterion) -> (Option<f64>, Option<f64>, Option<f64>) {
    match (criterion.metric(), criterion.mode()) {
        (_, ThresholdMode::Dual { x0, y0 }) => (None, Some(x0), Some(y0)),
        (MetricSpec::X1 | MetricSpec::X2, ThresholdMode::Single { c0 }) => (None, Some(c0), None),
        (MetricSpec::Y1 | MetricSpec::Y2, ThresholdMode::Single { c0 }) => (None, None, Some(c0)),
        (_, ThresholdMode::Single { c0 }) => (Some(c0), None, None),
    }
}

/// Legend bucket for a ratio cell, mirroring the report's shading bands.
fn band(v: Option<f64>) -> &'static str {
    match v {
        None => "",
        Some(v) if v <= 0.1 => "<=0.1",
        Some(v) if v <= 0.2 => "<=0.2",
        Some(v) if v <= 0.3 => "<=0.3",
        Some(v) if v <= 0.4 => "<=0.4",
        Some(v) if v <= 0.5 => "<=0.5",
        Some(_) => ">0.5",
    }
}

#[derive(Serialize)]
struct JsonSweepRow {
    label: String,
    metric: String,
    c0: Option<f64>,
    x0: Option<f64>,
    y0: Option<f64>,
    tp: usize,
    n_do: usize,
    n_gt: usize,
    precision: Option<f64>,
    recall: Option<f64>,
}

pub fn render_sweep(grid: &SweepGrid, format: Format) -> String {
    if format == Format::Jsonl {
        return json_lines(grid.rows.iter().map(|row| {
            let (c0, x0, y0) = sweep_axes(&row.criterion);
            JsonSweepRow {
                label: row.criterion.label(),
                metric: row.criterion.metric().to_string(),
                c0,
                x0,
                y0,
                tp: row.counts.tp,
                n_do: row.counts.n_do,
                n_gt: row.counts.n_gt,
                precision: row.counts.precision(),
                recall: row.counts.recall(),
            }
        }));
    }
    let cells: Vec<Vec<String>> = grid
        .rows
        .iter()
        .map(|row| {
            let (c0, x0, y0) = sweep_axes(&row.criterion);
            let mut out = vec![
                row.criterion.metric().to_string(),
                c0.or(x0).map(fmt_threshold).unwrap_or_default(),
                y0.map(fmt_threshold).unwrap_or_default(),
                fmt_ratio(row.counts.precision()),
                fmt_ratio(row.counts.recall()),
            ];
            if format == Format::Markdown {
                out.push(band(row.counts.precision()).to_string());
                out.push(band(row.counts.recall()).to_string());
            }
            out
        })
        .collect();
    match format {
        Format::Csv => csv_table(&["metric", "c0_or_x0", "y0", "precision", "recall"], &cells),
        _ => markdown_table(
            &[
                "metric",
                "c0/x0",
                "y0",
                "precision",
                "recall",
                "precision band",
                "recall band",
            ],
            &cells,
        ),
    }
}
