//! Line-delimited JSON annotation files.
//!
//! One record per line, one record per box:
//!
//! ```text
//! {"video_id":"v1","frame":0,"x":10,"y":20,"w":64,"h":32,"label":"vessel","id":"v-01"}
//! ```
//!
//! `id` is optional; everything else is required. The same schema carries
//! ground truth and detections. Blank lines are ignored. Loading groups
//! records into frames keyed by `(video_id, frame)` and returns the frames
//! sorted by that key; box order within a frame follows file order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// One labeled box of an annotated frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedBox {
    pub bbox: BBox,
    pub label: String,
    /// Optional stable object identity across frames.
    pub object_id: Option<String>,
}

/// All boxes of one video frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedFrame {
    pub video_id: String,
    pub frame_index: u64,
    pub boxes: Vec<AnnotatedBox>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    video_id: String,
    frame: u64,
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    id: Option<String>,
}

/// Parses annotation text. `source_name` names the input in errors
/// (typically the file path); every parse or validation error carries the
/// 1-based line number.
pub fn parse_annotations(text: &str, source_name: &str) -> Result<Vec<AnnotatedFrame>> {
    let fail = |line: usize, message: String| Error::Annotation {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut frames: Vec<AnnotatedFrame> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: Record =
            serde_json::from_str(raw).map_err(|e| fail(line, format!("malformed record: {e}")))?;
        let bbox = BBox::new(rec.x, rec.y, rec.w, rec.h).map_err(|e| fail(line, e.to_string()))?;
        let annotated = AnnotatedBox {
            bbox,
            label: rec.label,
            object_id: rec.id,
        };
        match frames
            .iter_mut()
            .find(|f| f.video_id == rec.video_id && f.frame_index == rec.frame)
        {
            Some(frame) => frame.boxes.push(annotated),
            None => frames.push(AnnotatedFrame {
                video_id: rec.video_id,
                frame_index: rec.frame,
                boxes: vec![annotated],
            }),
        }
    }
    frames.sort_by(|a, b| {
        a.video_id
            .cmp(&b.video_id)
            .then(a.frame_index.cmp(&b.frame_index))
    });
    Ok(frames)
}

/// Loads and validates an annotation file. See [`parse_annotations`].
pub fn load_annotations(path: &Path) -> Result<Vec<AnnotatedFrame>> {
    let text = fs::read_to_string(path)?;
    parse_annotations(&text, &path.display().to_string())
}

/// Serializes frames back into the line format, one record per box, frames
/// in the given order. Parsing the output of a loaded file reproduces the
/// loaded frames; fields are emitted in a fixed order.
pub fn serialize_annotations(frames: &[AnnotatedFrame]) -> String {
    let mut out = String::new();
    for frame in frames {
        for b in &frame.boxes {
            let rec = Record {
                video_id: frame.video_id.clone(),
                frame: frame.frame_index,
                x: b.bbox.x(),
                y: b.bbox.y(),
                w: b.bbox.width(),
                h: b.bbox.height(),
                label: b.label.clone(),
                id: b.object_id.clone(),
            };
            // Serialization of this record shape cannot fail.
            out.push_str(&serde_json::to_string(&rec).expect("record serialization"));
            out.push('\n');
        }
    }
    out
}

/// Writes frames to a file in the line format.
pub fn write_annotations(path: &Path, frames: &[AnnotatedFrame]) -> Result<()> {
    fs::write(path, serialize_annotations(frames))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_record() {
        let frames = parse_annotations(
            r#"{"video_id":"v1","frame":0,"x":0,"y":0,"w":10,"h":10,"label":"ferry"}"#,
            "test",
        )
        .unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].video_id, "v1");
        assert_eq!(frames[0].frame_index, 0);
        assert_eq!(frames[0].boxes.len(), 1);
        assert_eq!(frames[0].boxes[0].label, "ferry");
        assert_eq!(frames[0].boxes[0].bbox.area(), 100.0);
        assert_eq!(frames[0].boxes[0].object_id, None);
    }

    #[test]
    fn empty_input_yields_no_frames() {
        assert!(parse_annotations("", "test").unwrap().is_empty());
        assert!(parse_annotations("\n  \n", "test").unwrap().is_empty());
    }

    #[test]
    fn groups_records_into_frames_and_sorts() {
        let text = concat!(
            r#"{"video_id":"b","frame":1,"x":0,"y":0,"w":5,"h":5,"label":"x"}"#, "\n",
            r#"{"video_id":"a","frame":2,"x":0,"y":0,"w":5,"h":5,"label":"x"}"#, "\n",
            r#"{"video_id":"b","frame":0,"x":0,"y":0,"w":5,"h":5,"label":"x"}"#, "\n",
            r#"{"video_id":"b","frame":1,"x":9,"y":9,"w":5,"h":5,"label":"y"}"#, "\n",
        );
        let frames = parse_annotations(text, "test").unwrap();
        let keys: Vec<_> = frames
            .iter()
            .map(|f| (f.video_id.as_str(), f.frame_index, f.boxes.len()))
            .collect();
        assert_eq!(keys, vec![("a", 2, 1), ("b", 0, 1), ("b", 1, 2)]);
        // Box order within a frame follows the file.
        assert_eq!(frames[2].boxes[0].label, "x");
        assert_eq!(frames[2].boxes[1].label, "y");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = concat!(
            r#"{"video_id":"v","frame":0,"x":0,"y":0,"w":10,"h":10,"label":"a"}"#, "\n",
            r#"{"video_id":"v","frame":1,"x":0,"y":0,"w":0,"h":10,"label":"a"}"#, "\n",
        );
        let err = parse_annotations(text, "dets.jsonl").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("dets.jsonl:2:"), "{msg}");
        assert!(msg.contains("strictly positive"), "{msg}");
    }

    #[test]
    fn malformed_json_errors_name_the_line() {
        let text = "{\"video_id\":\"v\",\"frame\":0,\"x\":0,\"y\":0,\"w\":10,\"h\":10,\"label\":\"a\"}\nnot json\n";
        let err = parse_annotations(text, "gt.jsonl").unwrap_err();
        assert!(err.to_string().starts_with("gt.jsonl:2:"), "{err}");
    }

    #[test]
    fn missing_field_is_an_error() {
        let err = parse_annotations(
            r#"{"video_id":"v","frame":0,"x":0,"y":0,"w":10,"label":"a"}"#,
            "t",
        )
        .unwrap_err();
        assert!(err.to_string().contains("malformed record"), "{err}");
    }

    #[test]
    fn round_trip_preserves_bytes_for_canonical_input() {
        let text = concat!(
            r#"{"video_id":"a","frame":0,"x":1.0,"y":2.0,"w":3.0,"h":4.0,"label":"boat","id":"a-1"}"#, "\n",
            r#"{"video_id":"a","frame":1,"x":1.5,"y":2.0,"w":3.0,"h":4.0,"label":"boat","id":"a-1"}"#, "\n",
            r#"{"video_id":"b","frame":0,"x":0.0,"y":0.0,"w":9.0,"h":9.0,"label":"buoy"}"#, "\n",
        );
        let frames = parse_annotations(text, "t").unwrap();
        assert_eq!(serialize_annotations(&frames), text);
    }

    #[test]
    fn parse_of_serialize_is_identity() {
        let frames = parse_annotations(
            concat!(
                r#"{"video_id":"z","frame":3,"x":-4,"y":0,"w":12,"h":7,"label":"skiff"}"#, "\n",
                r#"{"video_id":"z","frame":3,"x":30,"y":1,"w":6,"h":6,"label":"buoy","id":"k"}"#, "\n",
            ),
            "t",
        )
        .unwrap();
        let back = parse_annotations(&serialize_annotations(&frames), "t2").unwrap();
        assert_eq!(frames, back);
    }

    #[test]
    fn load_and_write_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ann.jsonl");
        let frames = parse_annotations(
            r#"{"video_id":"v","frame":0,"x":0,"y":0,"w":10,"h":10,"label":"a"}"#,
            "t",
        )
        .unwrap();
        write_annotations(&path, &frames).unwrap();
        assert_eq!(load_annotations(&path).unwrap(), frames);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        assert!(matches!(
            load_annotations(Path::new("/nonexistent/x.jsonl")),
            Err(Error::Io(_))
        ));
    }
}
