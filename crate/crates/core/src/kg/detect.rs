use serde::{Deserialize, Serialize};

use super::{KgError, Predicate};
use crate::geometry::{center_distance, iou};
use crate::ingest::{Category, Tubelet};
use crate::interval::TimeInterval;

/// Thresholds for the per-frame interaction predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    /// IoU at or above which two boxes touch.
    pub tau_touch: f64,
    /// Center distance at or below which two boxes are near.
    pub tau_near: f64,
    /// Longest run of non-qualifying frames bridged inside one interaction.
    pub gap_tolerance: u32,
    /// Shortest interaction kept, in frames from first to last.
    pub min_duration: u32,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            tau_touch: 0.1,
            tau_near: 0.2,
            gap_tolerance: 2,
            min_duration: 3,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<(), KgError> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !unit(self.tau_touch) {
            return Err(KgError::InvalidConfig(format!(
                "tau_touch {} is not in (0, 1)",
                self.tau_touch
            )));
        }
        if !unit(self.tau_near) {
            return Err(KgError::InvalidConfig(format!(
                "tau_near {} is not in (0, 1)",
                self.tau_near
            )));
        }
        Ok(())
    }
}

/// An interaction between two tubelets before it is numbered into a graph.
/// `subject` and `object` index the slice passed to the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub subject: usize,
    pub object: usize,
    pub predicate: Predicate,
    pub interval: TimeInterval,
    /// Sum of per-frame overlap scores and the number of scored frames.
    pub overlap_sum: f64,
    pub overlap_frames: u32,
}

impl Interaction {
    pub fn mean_overlap(&self) -> f64 {
        if self.overlap_frames == 0 {
            0.0
        } else {
            (self.overlap_sum / f64::from(self.overlap_frames)).clamp(0.0, 1.0)
        }
    }
}

/// Returns `true` when `a` takes the subject role against `b`: the
/// instrument when categories differ, otherwise the smaller track id.
pub fn is_subject(a: &Tubelet, b: &Tubelet) -> bool {
    role_subject(a.category, &a.track_id, b.category, &b.track_id)
}

pub(crate) fn role_subject(a_cat: Category, a_track: &str, b_cat: Category, b_track: &str) -> bool {
    if a_cat != b_cat {
        a_cat == Category::Instrument
    } else {
        a_track < b_track
    }
}

struct Run {
    first: u32,
    last: u32,
    sum: f64,
    frames: u32,
}

/// Detects the interactions between two tubelets of the same video.
///
/// Each shared frame is labelled `touches` when IoU reaches `tau_touch`,
/// else `near` when the center distance is within `tau_near`. Frames with
/// the same label are grouped into maximal runs whose internal gaps are at
/// most `gap_tolerance` frames, and runs spanning fewer than `min_duration`
/// frames are dropped. Output is ordered by predicate, then start frame.
///
/// `a_idx` and `b_idx` are written into the `subject`/`object` fields after
/// the role rule is applied.
pub fn detect_interactions(
    a: &Tubelet,
    b: &Tubelet,
    a_idx: usize,
    b_idx: usize,
    cfg: &DetectionConfig,
) -> Result<Vec<Interaction>, KgError> {
    if a.video_id != b.video_id {
        return Err(KgError::VideoMismatch {
            a: a.video_id.clone(),
            b: b.video_id.clone(),
        });
    }
    if a.track_id == b.track_id {
        return Err(KgError::SameTubelet(a.track_id.clone()));
    }
    let (subject, object) = if is_subject(a, b) {
        (a_idx, b_idx)
    } else {
        (b_idx, a_idx)
    };

    let mut runs: [Vec<Run>; 2] = [Vec::new(), Vec::new()];
    let (mut i, mut j) = (0, 0);
    while i < a.boxes.len() && j < b.boxes.len() {
        let (fa, fb) = (&a.boxes[i], &b.boxes[j]);
        if fa.frame < fb.frame {
            i += 1;
            continue;
        }
        if fb.frame < fa.frame {
            j += 1;
            continue;
        }
        let frame = fa.frame;
        let overlap = iou(&fa.bbox, &fb.bbox);
        let label = if overlap >= cfg.tau_touch {
            Some((Predicate::Touches, overlap))
        } else {
            let d = center_distance(&fa.bbox, &fb.bbox);
            (d <= cfg.tau_near).then(|| (Predicate::Near, (1.0 - d).clamp(0.0, 1.0)))
        };
        if let Some((pred, score)) = label {
            let slot = &mut runs[pred as usize];
            match slot.last_mut() {
                Some(run) if frame - run.last - 1 <= cfg.gap_tolerance => {
                    run.last = frame;
                    run.sum += score;
                    run.frames += 1;
                }
                _ => slot.push(Run {
                    first: frame,
                    last: frame,
                    sum: score,
                    frames: 1,
                }),
            }
        }
        i += 1;
        j += 1;
    }

    let mut out = Vec::new();
    for pred in Predicate::ALL {
        for run in &runs[pred as usize] {
            if u64::from(run.last - run.first) + 1 < u64::from(cfg.min_duration) {
                continue;
            }
            out.push(Interaction {
                subject,
                object,
                predicate: pred,
                interval: TimeInterval {
                    start: run.first,
                    end: run.last,
                },
                overlap_sum: run.sum,
                overlap_frames: run.frames,
            });
        }
    }
    Ok(out)
}
