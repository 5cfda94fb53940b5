//! Scripted scene simulator.
//!
//! Every cast member owns one cell of a grid laid over the frame and drifts
//! inside it on a piecewise-linear path. During a scripted event the subject
//! leaves its own cell and sits on top of the object inside the object's
//! cell. Since an entity takes part in at most one event per frame, two
//! entities only ever share a cell while they are scripted to touch, so every
//! other pair has zero overlap on every frame.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CastMember, Category, FrameBox, IngestError, SceneScript, ScriptEvent, Tubelet};
use crate::geometry::{iou, BoundingBox};
use crate::interval::TimeInterval;

const INSTRUMENT_LABELS: [&str; 10] = [
    "grasper",
    "hook",
    "scissors",
    "clipper",
    "irrigator",
    "bipolar",
    "specimen_bag",
    "needle_driver",
    "trocar",
    "suction",
];

const ANATOMY_LABELS: [&str; 10] = [
    "gallbladder",
    "liver",
    "cystic_duct",
    "cystic_artery",
    "omentum",
    "abdominal_wall",
    "gut",
    "peritoneum",
    "fat",
    "blood_vessel",
];

/// Extra IoU headroom required on event frames, above `tau_touch`.
const TOUCH_MARGIN: f64 = 0.01;

/// Box geometry for simulated scenes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    /// Smallest box side, as a fraction of the frame.
    pub box_min: f64,
    /// Largest box side, as a fraction of the frame.
    pub box_max: f64,
    /// Must equal the detector's touch threshold.
    pub tau_touch: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            box_min: 0.05,
            box_max: 0.09,
            tau_touch: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomScriptParams {
    pub video_id: String,
    pub n_instruments: usize,
    pub n_anatomy: usize,
    pub n_events: usize,
    pub frame_count: u32,
    pub min_event_len: u32,
    pub max_event_len: u32,
    /// Minimum number of untouched frames between two events of the same
    /// pair. Must exceed the detector's gap tolerance or the two events are
    /// recovered as one edge.
    pub min_pair_gap: u32,
}

impl RandomScriptParams {
    pub fn new(n_instruments: usize, n_anatomy: usize, n_events: usize, frame_count: u32) -> Self {
        Self {
            video_id: "scene".into(),
            n_instruments,
            n_anatomy,
            n_events,
            frame_count,
            min_event_len: 5,
            max_event_len: 40,
            min_pair_gap: 5,
        }
    }
}

fn class_label(lexicon: &[&str], idx: usize) -> String {
    let base = lexicon[idx % lexicon.len()];
    match idx / lexicon.len() {
        0 => base.to_string(),
        k => format!("{base}_{}", k + 1),
    }
}

/// Draws a random valid script. Subjects are instruments whenever the cast
/// has one; labels repeat within a category so that classes are not all
/// unique.
pub fn generate_random_script(
    params: &RandomScriptParams,
    seed: u64,
) -> Result<SceneScript, IngestError> {
    let infeasible = |msg: String| Err(IngestError::InfeasibleParams(msg));
    let n = params.n_instruments + params.n_anatomy;
    if n == 0 {
        return infeasible("cast is empty".into());
    }
    if params.frame_count == 0 {
        return infeasible("frame_count must be positive".into());
    }
    if params.min_event_len == 0 || params.min_event_len > params.max_event_len {
        return infeasible(format!(
            "event length range [{}, {}] is empty",
            params.min_event_len, params.max_event_len
        ));
    }
    if params.n_events > 0 {
        if n < 2 {
            return infeasible("events need at least two cast members".into());
        }
        if params.min_event_len > params.frame_count {
            return infeasible(format!(
                "events of {} frames do not fit in {} frames",
                params.min_event_len, params.frame_count
            ));
        }
        let capacity = u64::from(params.frame_count) * (n as u64 / 2);
        if params.n_events as u64 * u64::from(params.min_event_len) > capacity {
            return infeasible(format!(
                "{} events of at least {} frames exceed the capacity of {} entities over {} frames",
                params.n_events, params.min_event_len, n, params.frame_count
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cast = Vec::with_capacity(n);
    for (count, prefix, lexicon, category) in [
        (
            params.n_instruments,
            "inst",
            &INSTRUMENT_LABELS,
            Category::Instrument,
        ),
        (params.n_anatomy, "anat", &ANATOMY_LABELS, Category::Anatomy),
    ] {
        let pool = count.div_ceil(2).max(1);
        for i in 0..count {
            cast.push(CastMember {
                track_id: format!("{prefix}_{i:02}"),
                class_label: class_label(lexicon.as_slice(), rng.random_range(0..pool)),
                category,
            });
        }
    }

    let max_len = params.max_event_len.min(params.frame_count);
    let mut events: Vec<(usize, usize, TimeInterval)> = Vec::with_capacity(params.n_events);
    const TRIES_PER_EVENT: usize = 2000;
    for k in 0..params.n_events {
        let mut placed = false;
        for _ in 0..TRIES_PER_EVENT {
            let subject = if params.n_instruments > 0 {
                rng.random_range(0..params.n_instruments)
            } else {
                rng.random_range(0..n)
            };
            let mut object = rng.random_range(0..n - 1);
            if object >= subject {
                object += 1;
            }
            let len = rng.random_range(params.min_event_len..=max_len);
            let start = rng.random_range(0..=params.frame_count - len);
            let interval = TimeInterval {
                start,
                end: start + len - 1,
            };
            let clash = events.iter().any(|&(s, o, iv)| {
                let shares_entity = s == subject || s == object || o == subject || o == object;
                let same_pair = (s == subject && o == object) || (s == object && o == subject);
                (shares_entity && iv.intersects(&interval))
                    || (same_pair && iv.gap_to(&interval) < params.min_pair_gap)
            });
            if !clash {
                events.push((subject, object, interval));
                placed = true;
                break;
            }
        }
        if !placed {
            return infeasible(format!(
                "could not place event {} of {} without conflicts",
                k + 1,
                params.n_events
            ));
        }
    }
    events.sort_by_key(|&(s, o, iv)| (iv.start, iv.end, s, o));

    let script = SceneScript {
        video_id: params.video_id.clone(),
        frame_count: params.frame_count,
        events: events
            .into_iter()
            .map(|(s, o, interval)| ScriptEvent {
                subject: cast[s].track_id.clone(),
                object: cast[o].track_id.clone(),
                interval,
            })
            .collect(),
        cast,
    };
    debug_assert!(script.validate().is_ok());
    Ok(script)
}

#[derive(Clone, Copy)]
struct Cell {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Cell {
    /// Places a `w`×`h` box with top-left near `(x, y)`, shifted to lie inside
    /// the cell.
    fn fit(&self, x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        let x = x.clamp(self.x0, (self.x1 - w).max(self.x0));
        let y = y.clamp(self.y0, (self.y1 - h).max(self.y0));
        rounded(BoundingBox::new(
            x,
            y,
            (x + w).min(self.x1),
            (y + h).min(self.y1),
        ))
    }
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn rounded(b: BoundingBox) -> BoundingBox {
    BoundingBox::new(round6(b.x1), round6(b.y1), round6(b.x2), round6(b.y2))
}

/// Renders a script into one full-length tubelet per cast member.
///
/// For every scripted event the pair's IoU is at least `tau_touch` on
/// exactly the event frames; every other pair of boxes on every frame has
/// zero overlap.
pub fn generate_scene(
    script: &SceneScript,
    geom: &GeometryConfig,
    seed: u64,
) -> Result<Vec<Tubelet>, IngestError> {
    script.validate()?;
    let infeasible = |msg: String| Err(IngestError::InfeasibleScript(msg));
    if !(geom.box_min > 0.0 && geom.box_min <= geom.box_max && geom.box_max <= 1.0) {
        return infeasible(format!(
            "box size range [{}, {}] is not within (0, 1]",
            geom.box_min, geom.box_max
        ));
    }
    if !(geom.tau_touch > 0.0 && geom.tau_touch < 1.0) {
        return infeasible(format!("tau_touch {} is not in (0, 1)", geom.tau_touch));
    }
    let n = script.cast.len();
    if n == 0 {
        return Ok(Vec::new());
    }

    let index: HashMap<&str, usize> = script
        .cast
        .iter()
        .enumerate()
        .map(|(i, m)| (m.track_id.as_str(), i))
        .collect();
    let mut busy: Vec<Vec<TimeInterval>> = vec![Vec::new(); n];
    for ev in &script.events {
        busy[index[ev.subject.as_str()]].push(ev.interval);
        busy[index[ev.object.as_str()]].push(ev.interval);
    }
    for (i, spans) in busy.iter_mut().enumerate() {
        spans.sort();
        if let Some(w) = spans.windows(2).find(|w| w[0].intersects(&w[1])) {
            return infeasible(format!(
                "track {} takes part in simultaneous events {} and {}",
                script.cast[i].track_id, w[0], w[1]
            ));
        }
    }

    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let (cell_w, cell_h) = (1.0 / cols as f64, 1.0 / rows as f64);
    if geom.box_max > cell_w.min(cell_h) {
        return infeasible(format!(
            "{n} entities need cells of {:.4} but boxes may reach {}",
            cell_w.min(cell_h),
            geom.box_max
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..rows * cols).collect();
    slots.shuffle(&mut rng);
    let cells: Vec<Cell> = slots[..n]
        .iter()
        .map(|&s| {
            let (r, c) = (s / cols, s % cols);
            Cell {
                x0: c as f64 / cols as f64,
                y0: r as f64 / rows as f64,
                x1: (c + 1) as f64 / cols as f64,
                y1: (r + 1) as f64 / rows as f64,
            }
        })
        .collect();
    let sizes: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.random_range(geom.box_min..=geom.box_max),
                rng.random_range(geom.box_min..=geom.box_max),
            )
        })
        .collect();

    let frames = script.frame_count as usize;
    let mut tracks: Vec<Vec<BoundingBox>> = (0..n)
        .map(|i| home_path(&mut rng, &cells[i], sizes[i], frames))
        .collect();

    for ev in &script.events {
        let (s, o) = (index[ev.subject.as_str()], index[ev.object.as_str()]);
        let (ws, hs) = sizes[s];
        let spread_x = 0.3 * ws.min(sizes[o].0);
        let spread_y = 0.3 * hs.min(sizes[o].1);
        let dx = rng.random_range(-spread_x..=spread_x);
        let dy = rng.random_range(-spread_y..=spread_y);
        for f in ev.interval.start..=ev.interval.end {
            let f = f as usize;
            let target = tracks[o][f];
            let (cx, cy) = target.center();
            let cell = cells[o];
            let mut placed = cell.fit(cx + dx - ws / 2.0, cy + dy - hs / 2.0, ws, hs);
            if iou(&placed, &target) < geom.tau_touch + TOUCH_MARGIN {
                placed = cell.fit(cx - ws / 2.0, cy - hs / 2.0, ws, hs);
            }
            if iou(&placed, &target) < geom.tau_touch + TOUCH_MARGIN {
                return infeasible(format!(
                    "boxes of {} and {} are too different in size to reach IoU {}",
                    ev.subject, ev.object, geom.tau_touch
                ));
            }
            tracks[s][f] = placed;
        }
    }

    Ok(script
        .cast
        .iter()
        .zip(tracks)
        .map(|(m, boxes)| Tubelet {
            video_id: script.video_id.clone(),
            track_id: m.track_id.clone(),
            class_label: m.class_label.clone(),
            category: m.category,
            boxes: boxes
                .into_iter()
                .enumerate()
                .map(|(f, bbox)| FrameBox {
                    frame: f as u32,
                    bbox,
                })
                .collect(),
        })
        .collect())
}

/// Piecewise-linear drift inside a cell between random waypoints.
fn home_path(
    rng: &mut ChaCha8Rng,
    cell: &Cell,
    (w, h): (f64, f64),
    frames: usize,
) -> Vec<BoundingBox> {
    let pick = |rng: &mut ChaCha8Rng| {
        (
            rng.random_range(cell.x0..=(cell.x1 - w).max(cell.x0)),
            rng.random_range(cell.y0..=(cell.y1 - h).max(cell.y0)),
        )
    };
    let mut out = Vec::with_capacity(frames);
    let mut from_frame = 0usize;
    let mut from = pick(rng);
    while out.len() < frames {
        let to_frame = from_frame + rng.random_range(20..=60);
        let to = pick(rng);
        let span = (to_frame - from_frame) as f64;
        for f in from_frame..to_frame.min(frames) {
            let t = (f - from_frame) as f64 / span;
            let x = from.0 + (to.0 - from.0) * t;
            let y = from.1 + (to.1 - from.1) * t;
            out.push(cell.fit(x, y, w, h));
        }
        from_frame = to_frame;
        from = to;
    }
    out
}
