//! Brute-force reference implementations shared by the integration tests.
//! Each one is written from the definitions, without calling the library
//! routine it is compared against.
#![allow(dead_code)]

use hopforge_core::geometry::BoundingBox;
use hopforge_core::ingest::{Category, FrameBox, Tubelet};
use hopforge_core::kg::{DetectionConfig, Predicate};
use hopforge_core::AllenRelation;
use rand::Rng;

/// Allen relation of `[s1, e1]` and `[s2, e2]` read as the real half-open
/// intervals `[s1, e1 + 1)` and `[s2, e2 + 1)`.
pub fn allen_by_points(s1: u32, e1: u32, s2: u32, e2: u32) -> AllenRelation {
    use AllenRelation::*;
    let (a0, a1, b0, b1) = (s1 as i64, e1 as i64 + 1, s2 as i64, e2 as i64 + 1);
    if a1 < b0 {
        Before
    } else if a1 == b0 {
        Meets
    } else if b1 < a0 {
        After
    } else if b1 == a0 {
        MetBy
    } else if a0 == b0 && a1 == b1 {
        Equals
    } else if a0 == b0 {
        if a1 < b1 {
            Starts
        } else {
            StartedBy
        }
    } else if a1 == b1 {
        if a0 > b0 {
            Finishes
        } else {
            FinishedBy
        }
    } else if a0 > b0 && a1 < b1 {
        During
    } else if a0 < b0 && a1 > b1 {
        Contains
    } else if a0 < b0 {
        Overlaps
    } else {
        OverlappedBy
    }
}

/// Whether `rel` holds between `[s1, e1]` and `[s2, e2]`, tested on its own
/// endpoint conditions over the half-open reading `[s, e + 1)`.
pub fn allen_holds(rel: AllenRelation, s1: u32, e1: u32, s2: u32, e2: u32) -> bool {
    use AllenRelation::*;
    let (a0, a1, b0, b1) = (s1 as i64, e1 as i64 + 1, s2 as i64, e2 as i64 + 1);
    match rel {
        Before => a1 < b0,
        Meets => a1 == b0,
        Overlaps => a0 < b0 && b0 < a1 && a1 < b1,
        Starts => a0 == b0 && a1 < b1,
        During => b0 < a0 && a1 < b1,
        Finishes => b0 < a0 && a1 == b1,
        Equals => a0 == b0 && a1 == b1,
        FinishedBy => a0 < b0 && a1 == b1,
        Contains => a0 < b0 && b1 < a1,
        StartedBy => a0 == b0 && b1 < a1,
        OverlappedBy => b0 < a0 && a0 < b1 && b1 < a1,
        MetBy => b1 == a0,
        After => b1 < a0,
    }
}

fn area(b: &BoundingBox) -> f64 {
    (b.x2 - b.x1) * (b.y2 - b.y1)
}

pub fn naive_iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let w = a.x2.min(b.x2) - a.x1.max(b.x1);
    let h = a.y2.min(b.y2) - a.y1.max(b.y1);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let inter = w * h;
    (inter / (area(a) + area(b) - inter)).clamp(0.0, 1.0)
}

pub fn naive_distance(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let dx = (a.x1 + a.x2) * 0.5 - (b.x1 + b.x2) * 0.5;
    let dy = (a.y1 + a.y2) * 0.5 - (b.y1 + b.y2) * 0.5;
    dx.hypot(dy)
}

/// An expected interaction, with endpoints named by track id.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub subject: String,
    pub object: String,
    pub predicate: Predicate,
    pub start: u32,
    pub end: u32,
    pub mean_overlap: f64,
}

/// Labels every frame of the timeline, then splits each predicate's frames
/// into groups by counting the unlabelled frames between neighbours.
pub fn naive_interactions(a: &Tubelet, b: &Tubelet, cfg: &DetectionConfig) -> Vec<Expected> {
    let horizon = a
        .boxes
        .iter()
        .chain(&b.boxes)
        .map(|f| f.frame as usize + 1)
        .max()
        .unwrap_or(0);
    let mut label: Vec<Option<(Predicate, f64)>> = vec![None; horizon];
    for fa in &a.boxes {
        if let Some(fb) = b.boxes.iter().find(|f| f.frame == fa.frame) {
            let o = naive_iou(&fa.bbox, &fb.bbox);
            let d = naive_distance(&fa.bbox, &fb.bbox);
            label[fa.frame as usize] = if o >= cfg.tau_touch {
                Some((Predicate::Touches, o))
            } else if d <= cfg.tau_near {
                Some((Predicate::Near, (1.0 - d).clamp(0.0, 1.0)))
            } else {
                None
            };
        }
    }
    let a_leads = if a.category != b.category {
        a.category == Category::Instrument
    } else {
        a.track_id < b.track_id
    };
    let (subj, obj) = if a_leads { (a, b) } else { (b, a) };

    let mut out = Vec::new();
    for pred in [Predicate::Touches, Predicate::Near] {
        let frames: Vec<(usize, f64)> = label
            .iter()
            .enumerate()
            .filter_map(|(f, l)| l.filter(|(p, _)| *p == pred).map(|(_, s)| (f, s)))
            .collect();
        let mut groups: Vec<Vec<(usize, f64)>> = Vec::new();
        for (f, s) in frames {
            let joins = groups.last().is_some_and(|g| {
                let prev = g.last().unwrap().0;
                (prev + 1..f).count() <= cfg.gap_tolerance as usize
            });
            if joins {
                groups.last_mut().unwrap().push((f, s));
            } else {
                groups.push(vec![(f, s)]);
            }
        }
        for g in groups {
            let (start, end) = (g[0].0, g[g.len() - 1].0);
            if (start..=end).count() < cfg.min_duration as usize {
                continue;
            }
            let mean = g.iter().map(|x| x.1).sum::<f64>() / g.len() as f64;
            out.push(Expected {
                subject: subj.track_id.clone(),
                object: obj.track_id.clone(),
                predicate: pred,
                start: start as u32,
                end: end as u32,
                mean_overlap: mean,
            });
        }
    }
    out
}

fn jitter_box<R: Rng>(rng: &mut R, around: &BoundingBox, spread: f64) -> BoundingBox {
    let w = rng.random_range(0.05..0.2);
    let h = rng.random_range(0.05..0.2);
    let (cx, cy) = ((around.x1 + around.x2) * 0.5, (around.y1 + around.y2) * 0.5);
    let x1 = (cx + rng.random_range(-spread..spread) - w * 0.5).clamp(0.0, 1.0 - w);
    let y1 = (cy + rng.random_range(-spread..spread) - h * 0.5).clamp(0.0, 1.0 - h);
    BoundingBox::new(x1, y1, x1 + w, y1 + h)
}

/// Two tubelets of the same video whose boxes drift close and apart, with
/// missed detections, so that touches, near, gaps and short runs all occur.
pub fn random_tubelet_pair<R: Rng>(rng: &mut R) -> (Tubelet, Tubelet) {
    let horizon = rng.random_range(10..80u32);
    let mut anchor = BoundingBox::new(0.4, 0.4, 0.55, 0.55);
    let mut spread: f64 = rng.random_range(0.0..0.3);
    let mut boxes_a = Vec::new();
    let mut boxes_b = Vec::new();
    for frame in 0..horizon {
        if rng.random_bool(0.15) {
            spread = rng.random_range(0.0..0.3);
        }
        anchor = jitter_box(rng, &anchor, 0.02);
        if rng.random_bool(0.9) {
            boxes_a.push(FrameBox {
                frame,
                bbox: jitter_box(rng, &anchor, spread),
            });
        }
        if rng.random_bool(0.9) {
            boxes_b.push(FrameBox {
                frame,
                bbox: jitter_box(rng, &anchor, spread),
            });
        }
    }
    let cat = |rng: &mut R| {
        if rng.random_bool(0.5) {
            Category::Instrument
        } else {
            Category::Anatomy
        }
    };
    let ids = if rng.random_bool(0.5) {
        ("t1", "t2")
    } else {
        ("t2", "t1")
    };
    let make = |track: &str, category, boxes| Tubelet {
        video_id: "v".into(),
        track_id: track.into(),
        class_label: format!("class_{track}"),
        category,
        boxes,
    };
    let (ca, cb) = (cat(rng), cat(rng));
    (make(ids.0, ca, boxes_a), make(ids.1, cb, boxes_b))
}

use hopforge_core::synth::{Answer, QaSample};
use hopforge_core::validate::ViolationKind;
use hopforge_core::TimeInterval;

/// Damages one aspect of a sample so that exactly `kind` should be reported.
/// `edge_count` is the size of the graph the sample was drawn from.
pub fn corrupt(sample: &QaSample, kind: ViolationKind, edge_count: usize) -> QaSample {
    let mut s = sample.clone();
    match kind {
        ViolationKind::AnswerMismatch => {
            s.answer = match &s.answer {
                Answer::EntityClass(c) => Answer::EntityClass(format!("{c}_corrupted")),
                Answer::TimeSpan(iv) => {
                    Answer::TimeSpan(TimeInterval::new(iv.start, iv.end + 1).unwrap())
                }
                Answer::Count(n) => Answer::Count(n + 1),
            }
        }
        ViolationKind::MissingEvidence => {
            let last = s.evidence.edge_ids.len() - 1;
            s.evidence.edge_ids[last] = edge_count + 17;
        }
        ViolationKind::SpanMismatch => {
            s.evidence.span = match s.evidence.span {
                Some(iv) => Some(TimeInterval::new(iv.start, iv.end + 3).unwrap()),
                None => Some(TimeInterval::new(0, 0).unwrap()),
            }
        }
        ViolationKind::DepthBookkeeping => s.designed_depth += 1,
    }
    s
}

pub const ALL_KINDS: [ViolationKind; 4] = [
    ViolationKind::AnswerMismatch,
    ViolationKind::MissingEvidence,
    ViolationKind::SpanMismatch,
    ViolationKind::DepthBookkeeping,
];
