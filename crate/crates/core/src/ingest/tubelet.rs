use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::geometry::BoundingBox;
use crate::interval::TimeInterval;

/// Ontology category of a tracked entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Instrument,
    Anatomy,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Instrument => "instrument",
            Category::Anatomy => "anatomy",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One detection of a track: the frame it was seen on and where.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBox {
    pub frame: u32,
    pub bbox: BoundingBox,
}

/// A tracked entity across frames. Frame indices are strictly increasing;
/// gaps are missed detections.
#[derive(Debug, Clone, PartialEq)]
pub struct Tubelet {
    pub video_id: String,
    pub track_id: String,
    pub class_label: String,
    pub category: Category,
    pub boxes: Vec<FrameBox>,
}

impl Tubelet {
    /// `[first frame, last frame]`, or `None` for a tubelet with no boxes.
    pub fn lifespan(&self) -> Option<TimeInterval> {
        let first = self.boxes.first()?.frame;
        let last = self.boxes.last()?.frame;
        TimeInterval::new(first, last)
    }

    /// Checks the per-record invariants. `line` is reported in errors.
    pub fn validate(&self, line: usize) -> Result<(), IngestError> {
        if self.boxes.is_empty() {
            return Err(IngestError::EmptyBoxes { line });
        }
        let mut prev: Option<u32> = None;
        for fb in &self.boxes {
            if !fb.bbox.is_valid() {
                return Err(IngestError::CoordinateOutOfRange {
                    line,
                    frame: fb.frame,
                });
            }
            if let Some(p) = prev {
                if fb.frame <= p {
                    return Err(IngestError::NonIncreasingFrames {
                        line,
                        frame: fb.frame,
                    });
                }
            }
            prev = Some(fb.frame);
        }
        Ok(())
    }
}

/// Checks record invariants and `(video_id, track_id)` uniqueness for a
/// batch. Line numbers in errors are 1-based positions in the batch.
pub fn validate_batch(tubelets: &[Tubelet]) -> Result<(), IngestError> {
    let mut seen = HashSet::new();
    for (i, t) in tubelets.iter().enumerate() {
        t.validate(i + 1)?;
        if !seen.insert((t.video_id.as_str(), t.track_id.as_str())) {
            return Err(IngestError::DuplicateTrack {
                video_id: t.video_id.clone(),
                track_id: t.track_id.clone(),
            });
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TubeletRecord {
    video_id: String,
    track_id: String,
    class_label: String,
    category: Category,
    boxes: Vec<(u32, f64, f64, f64, f64)>,
}

impl From<TubeletRecord> for Tubelet {
    fn from(r: TubeletRecord) -> Self {
        Tubelet {
            video_id: r.video_id,
            track_id: r.track_id,
            class_label: r.class_label,
            category: r.category,
            boxes: r
                .boxes
                .into_iter()
                .map(|(frame, x1, y1, x2, y2)| FrameBox {
                    frame,
                    bbox: BoundingBox::new(x1, y1, x2, y2),
                })
                .collect(),
        }
    }
}

impl From<&Tubelet> for TubeletRecord {
    fn from(t: &Tubelet) -> Self {
        TubeletRecord {
            video_id: t.video_id.clone(),
            track_id: t.track_id.clone(),
            class_label: t.class_label.clone(),
            category: t.category,
            boxes: t
                .boxes
                .iter()
                .map(|fb| (fb.frame, fb.bbox.x1, fb.bbox.y1, fb.bbox.x2, fb.bbox.y2))
                .collect(),
        }
    }
}

/// Reads a tubelet JSON-Lines stream in a single pass.
///
/// Blank lines are not permitted except for a trailing newline at the end of
/// the stream. Line numbers in errors are 1-based.
pub fn parse_tubelets<R: BufRead>(reader: R) -> Result<Vec<Tubelet>, IngestError> {
    let mut out = Vec::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| IngestError::Io {
            line: line_no,
            message: e.to_string(),
        })?;
        let record: TubeletRecord =
            serde_json::from_str(&line).map_err(|e| IngestError::MalformedRecord {
                line: line_no,
                message: e.to_string(),
            })?;
        let tubelet = Tubelet::from(record);
        tubelet.validate(line_no)?;
        if !seen.insert((tubelet.video_id.clone(), tubelet.track_id.clone())) {
            return Err(IngestError::DuplicateTrack {
                video_id: tubelet.video_id,
                track_id: tubelet.track_id,
            });
        }
        out.push(tubelet);
    }
    Ok(out)
}

/// Parses tubelets from an in-memory string.
pub fn parse_tubelets_str(text: &str) -> Result<Vec<Tubelet>, IngestError> {
    parse_tubelets(text.as_bytes())
}

/// Writes tubelets as JSON Lines, one record per line, LF-terminated.
pub fn write_tubelets(tubelets: &[Tubelet]) -> String {
    let mut out = String::new();
    for t in tubelets {
        let line = serde_json::to_string(&TubeletRecord::from(t))
            .expect("tubelet records always serialize");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO: &str = concat!(
        r#"{"video_id":"v","track_id":"t1","class_label":"grasper","category":"instrument","boxes":[[0,0.1,0.1,0.2,0.2],[2,0.1,0.1,0.2,0.25]]}"#,
        "\n",
        r#"{"video_id":"v","track_id":"t2","class_label":"liver","category":"anatomy","boxes":[[1,0.5,0.5,0.9,0.9]]}"#,
        "\n"
    );

    #[test]
    fn parses_in_file_order() {
        let ts = parse_tubelets_str(TWO).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[0].track_id, "t1");
        assert_eq!(ts[1].category, Category::Anatomy);
        assert_eq!(ts[0].lifespan(), TimeInterval::new(0, 2));
    }

    #[test]
    fn empty_stream() {
        assert!(parse_tubelets_str("").unwrap().is_empty());
        assert_eq!(write_tubelets(&[]), "");
    }

    #[test]
    fn inverted_coordinates_name_the_line() {
        let bad = r#"{"video_id":"v","track_id":"t","class_label":"x","category":"anatomy","boxes":[[0,0.7,0.1,0.3,0.2]]}"#;
        let text = format!("{}{}\n", TWO, bad);
        match parse_tubelets_str(&text) {
            Err(IngestError::CoordinateOutOfRange { line, frame }) => {
                assert_eq!(line, 3);
                assert_eq!(frame, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_records() {
        let dup = format!("{}{}", TWO, TWO.lines().next().unwrap());
        assert!(matches!(
            parse_tubelets_str(&dup),
            Err(IngestError::DuplicateTrack { .. })
        ));

        let unknown = r#"{"video_id":"v","track_id":"t","class_label":"x","category":"anatomy","boxes":[[0,0.1,0.1,0.3,0.2]],"score":1}"#;
        assert!(matches!(
            parse_tubelets_str(unknown),
            Err(IngestError::MalformedRecord { line: 1, .. })
        ));

        let frames = r#"{"video_id":"v","track_id":"t","class_label":"x","category":"anatomy","boxes":[[3,0.1,0.1,0.3,0.2],[3,0.1,0.1,0.3,0.2]]}"#;
        assert!(matches!(
            parse_tubelets_str(frames),
            Err(IngestError::NonIncreasingFrames { line: 1, frame: 3 })
        ));

        let empty =
            r#"{"video_id":"v","track_id":"t","class_label":"x","category":"anatomy","boxes":[]}"#;
        assert!(matches!(
            parse_tubelets_str(empty),
            Err(IngestError::EmptyBoxes { line: 1 })
        ));

        let category = r#"{"video_id":"v","track_id":"t","class_label":"x","category":"tool","boxes":[[0,0.1,0.1,0.3,0.2]]}"#;
        assert!(matches!(
            parse_tubelets_str(category),
            Err(IngestError::MalformedRecord { line: 1, .. })
        ));

        let blank = format!("\n{}", TWO);
        assert!(matches!(
            parse_tubelets_str(&blank),
            Err(IngestError::MalformedRecord { line: 1, .. })
        ));
    }

    #[test]
    fn single_round_trip() {
        let ts = parse_tubelets_str(TWO).unwrap();
        let text = write_tubelets(&ts[..1]);
        assert_eq!(text.lines().count(), 1);
        assert_eq!(parse_tubelets_str(&text).unwrap(), ts[..1].to_vec());
    }

    fn arb_tubelet(idx: usize) -> impl Strategy<Value = Tubelet> {
        let boxes = prop::collection::vec(
            (
                1u32..5,
                0.0..0.95f64,
                0.0..0.95f64,
                1e-6..0.05f64,
                1e-6..0.05f64,
            ),
            1..20,
        );
        ("[a-z]{1,3}", "[a-zA-Z_ ]{0,8}", prop::bool::ANY, boxes).prop_map(
            move |(video, label, inst, steps)| {
                let mut frame = 0u32;
                let boxes = steps
                    .into_iter()
                    .map(|(step, x, y, w, h)| {
                        frame += step;
                        FrameBox {
                            frame,
                            bbox: BoundingBox::new(x, y, x + w, y + h),
                        }
                    })
                    .collect();
                Tubelet {
                    video_id: video,
                    track_id: format!("track-{idx}"),
                    class_label: label,
                    category: if inst {
                        Category::Instrument
                    } else {
                        Category::Anatomy
                    },
                    boxes,
                }
            },
        )
    }

    fn arb_batch() -> impl Strategy<Value = Vec<Tubelet>> {
        (0usize..100).prop_flat_map(|n| (0..n).map(arb_tubelet).collect::<Vec<_>>())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip(batch in arb_batch()) {
            let text = write_tubelets(&batch);
            prop_assert_eq!(parse_tubelets_str(&text).unwrap(), batch);
        }
    }
}
